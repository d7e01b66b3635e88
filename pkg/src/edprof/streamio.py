"""Binary logit-stream (`.edls`) reader/writer and single-pass summarization.

One stream holds the full-vocabulary logit (or probability) vectors for one
generation. Layout is little-endian and byte-deterministic; the full byte
map lives in docs/edls-format.md. Reading is lazy: one record is buffered
at a time, so memory stays O(vocab_size) regardless of stream length.

Checksum: a 64-bit composite of CRC-32 (high word) and Adler-32 (low word)
over header and record bytes. Detects truncation and corruption; carries
no security claim.
"""

from __future__ import annotations

import enum
import struct
import zlib
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator

import numpy as np

from . import metrics
from .errors import (
    BadMagicError,
    ChecksumMismatchError,
    RecordMismatchError,
    TruncatedStreamError,
    UnsupportedVersionError,
    ValidationError,
)

MAGIC = b"EDLS"
FORMAT_VERSION = 1
END_MARKER = 0  # a record length of zero terminates the record section


class ValueKind(enum.Enum):
    RAW_LOGITS = 0
    PROBABILITIES = 1


class ValueWidth(enum.Enum):
    BINARY32 = 4
    BINARY64 = 8

    @property
    def dtype(self) -> np.dtype:
        return np.dtype("<f4") if self is ValueWidth.BINARY32 else np.dtype("<f8")


class _Checksum:
    """Running CRC-32 || Adler-32 composite, 64 bits total."""

    def __init__(self) -> None:
        self._crc = 0
        self._adler = 1

    def update(self, data: bytes) -> None:
        self._crc = zlib.crc32(data, self._crc)
        self._adler = zlib.adler32(data, self._adler)

    @property
    def value(self) -> int:
        return (self._crc << 32) | self._adler


def checksum64(data: bytes) -> int:
    c = _Checksum()
    c.update(data)
    return c.value


@dataclass(frozen=True)
class StreamHeader:
    vocab_size: int
    value_kind: ValueKind
    value_width: ValueWidth
    generation_id: str
    position_count_hint: int = 0
    metadata_digest: int = 0
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.vocab_size < 2:
            raise ValidationError(f"vocab_size must be >= 2, got {self.vocab_size}")
        if not 0 <= self.position_count_hint < 2**32:
            raise ValidationError("position_count_hint out of u32 range")
        if not 0 <= self.metadata_digest < 2**64:
            raise ValidationError("metadata_digest out of u64 range")

    @property
    def record_payload_bytes(self) -> int:
        return 8 + self.vocab_size * self.value_width.value


@dataclass(frozen=True)
class PositionRecord:
    position_index: int
    values: np.ndarray
    sampled_token_id: int


_FIXED_HEADER = struct.Struct("<4sHBBIIQH")


def _encode_header(header: StreamHeader) -> bytes:
    gid = header.generation_id.encode("utf-8")
    if len(gid) > 0xFFFF:
        raise ValidationError("generation_id longer than 65535 UTF-8 bytes")
    return (
        _FIXED_HEADER.pack(
            MAGIC,
            header.format_version,
            header.value_kind.value,
            header.value_width.value,
            header.vocab_size,
            header.position_count_hint,
            header.metadata_digest,
            len(gid),
        )
        + gid
    )


def write_stream(
    header: StreamHeader, records: Iterable[PositionRecord], sink: BinaryIO
) -> int:
    """Write a stream; returns the number of bytes written.

    Validates each record against the header (value count, dtype width,
    finite values, strictly increasing position_index). Output is
    byte-deterministic for identical inputs.
    """
    check = _Checksum()
    written = 0

    def emit(data: bytes, checksummed: bool = True) -> None:
        nonlocal written
        if checksummed:
            check.update(data)
        sink.write(data)
        written += len(data)

    emit(_encode_header(header))
    expected_dtype = header.value_width.dtype
    last_index = -1
    for rec in records:
        values = np.asarray(rec.values)
        if values.ndim != 1 or values.size != header.vocab_size:
            raise RecordMismatchError(
                f"record {rec.position_index}: {values.size} values, "
                f"header declares vocab_size {header.vocab_size}"
            )
        if values.dtype != expected_dtype.base:
            raise RecordMismatchError(
                f"record {rec.position_index}: dtype {values.dtype} does not match "
                f"declared width {header.value_width.name}"
            )
        if not np.isfinite(values).all():
            raise ValidationError(
                f"record {rec.position_index} contains non-finite values"
            )
        if rec.position_index <= last_index:
            raise RecordMismatchError(
                f"position_index {rec.position_index} not strictly increasing "
                f"(previous {last_index})"
            )
        if not 0 <= rec.position_index < 2**32 or not 0 <= rec.sampled_token_id < 2**32:
            raise ValidationError("position_index / sampled_token_id out of u32 range")
        last_index = rec.position_index
        body = (
            struct.pack("<II", rec.position_index, rec.sampled_token_id)
            + values.astype(expected_dtype, copy=False).tobytes()
        )
        emit(struct.pack("<I", len(body)))
        emit(body)
    emit(struct.pack("<I", END_MARKER), checksummed=False)
    emit(struct.pack("<Q", check.value), checksummed=False)
    return written


def write_stream_path(header: StreamHeader, records, path) -> int:
    with open(path, "wb") as fh:
        return write_stream(header, records, fh)


def _read_exact(source: BinaryIO, n: int, offset: int, what: str) -> bytes:
    data = source.read(n)
    if len(data) != n:
        raise TruncatedStreamError(
            f"stream ended while reading {what}: wanted {n} bytes, got {len(data)}",
            offset + len(data),
        )
    return data


def read_header(source: BinaryIO, check: _Checksum | None = None) -> tuple[StreamHeader, int]:
    """Parse the header; returns (header, bytes consumed)."""
    fixed = _read_exact(source, _FIXED_HEADER.size, 0, "header")
    magic, version, kind, width, vocab, hint, digest, gid_len = _FIXED_HEADER.unpack(fixed)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"unsupported format version {version}, reader supports {FORMAT_VERSION}"
        )
    try:
        value_kind = ValueKind(kind)
        value_width = ValueWidth(width)
    except ValueError as exc:
        raise RecordMismatchError(f"unknown value kind/width byte: {exc}") from exc
    gid_bytes = _read_exact(source, gid_len, _FIXED_HEADER.size, "generation_id")
    if check is not None:
        check.update(fixed)
        check.update(gid_bytes)
    header = StreamHeader(
        vocab_size=vocab,
        value_kind=value_kind,
        value_width=value_width,
        generation_id=gid_bytes.decode("utf-8"),
        position_count_hint=hint,
        metadata_digest=digest,
        format_version=version,
    )
    return header, _FIXED_HEADER.size + gid_len


def read_stream(source: BinaryIO) -> tuple[StreamHeader, Iterator[PositionRecord]]:
    """Open a stream for lazy reading.

    Returns the parsed header and a generator over records. The generator
    buffers one record at a time and verifies the whole-stream checksum
    when it reaches the end marker; stopping early skips that check.
    """
    check = _Checksum()
    header, offset = read_header(source, check)
    expected_len = header.record_payload_bytes

    def records() -> Iterator[PositionRecord]:
        pos = offset
        last_index = -1
        while True:
            prefix = _read_exact(source, 4, pos, "record length")
            (length,) = struct.unpack("<I", prefix)
            if length == END_MARKER:
                stored = _read_exact(source, 8, pos + 4, "stream checksum")
                (stored_value,) = struct.unpack("<Q", stored)
                if stored_value != check.value:
                    raise ChecksumMismatchError(
                        f"stream checksum mismatch: stored {stored_value:#018x}, "
                        f"computed {check.value:#018x}"
                    )
                return
            if length != expected_len:
                raise RecordMismatchError(
                    f"record length {length} at offset {pos} does not match header "
                    f"(expected {expected_len})"
                )
            body = _read_exact(source, length, pos + 4, "record body")
            check.update(prefix)
            check.update(body)
            index, token_id = struct.unpack_from("<II", body, 0)
            if index <= last_index:
                raise RecordMismatchError(
                    f"position_index {index} not strictly increasing (previous {last_index})"
                )
            last_index = index
            values = np.frombuffer(body, dtype=header.value_width.dtype, offset=8)
            pos += 4 + length
            yield PositionRecord(
                position_index=index, values=values, sampled_token_id=token_id
            )

    return header, records()


def read_stream_path(path):
    """Read an entire stream from disk eagerly; returns (header, list of records)."""
    with open(path, "rb") as fh:
        header, records = read_stream(fh)
        return header, list(records)


@dataclass(frozen=True)
class StreamSummary:
    """Single-pass aggregates for one stream (one generation)."""

    generation_id: str
    ed_mean: float
    ed_std: float
    length: int
    unique_token_count: int
    mean_entropy: float


def summarize_records(
    header: StreamHeader,
    records: Iterable[PositionRecord],
    temperature: float,
    ddof: int = 1,
) -> StreamSummary:
    """Summarize a record iterator in one pass with O(vocab_size) memory.

    raw_logits streams are rescaled by the given temperature before the
    softmax; probability streams are used as-is (the temperature argument
    must then be the one the values were produced with — it cannot be
    re-applied).

    Position indices must be contiguous from 0; gaps are rejected.
    """
    acc = metrics.EDAccumulator(ddof=ddof)
    entropy_sum = 0.0
    seen_tokens: set[int] = set()
    log_v = float(np.log(header.vocab_size))
    expected_index = 0
    for rec in records:
        if rec.position_index != expected_index:
            raise RecordMismatchError(
                f"position_index {rec.position_index} breaks contiguity "
                f"(expected {expected_index})"
            )
        expected_index += 1
        if header.value_kind is ValueKind.RAW_LOGITS:
            h = metrics.entropy_from_logits(rec.values, temperature)
        else:
            h = metrics.entropy(rec.values)
        entropy_sum += h
        acc.add(min(1.0, max(0.0, 1.0 - h / log_v)))
        seen_tokens.add(rec.sampled_token_id)
    if acc.count == 0:
        raise ValidationError("stream contains no records")
    return StreamSummary(
        generation_id=header.generation_id,
        ed_mean=acc.mean(),
        ed_std=acc.std(),
        length=acc.count,
        unique_token_count=len(seen_tokens),
        mean_entropy=entropy_sum / acc.count,
    )


def summarize_stream_path(path, temperature: float, ddof: int = 1) -> StreamSummary:
    with open(path, "rb") as fh:
        header, records = read_stream(fh)
        return summarize_records(header, records, temperature, ddof=ddof)


def per_position_eds(path, temperature: float) -> np.ndarray:
    """Per-position ED series of a stream on disk (used by the
    autocorrelation analysis)."""
    with open(path, "rb") as fh:
        header, records = read_stream(fh)
        log_v = float(np.log(header.vocab_size))
        eds = []
        for rec in records:
            if header.value_kind is ValueKind.RAW_LOGITS:
                h = metrics.entropy_from_logits(rec.values, temperature)
            else:
                h = metrics.entropy(rec.values)
            eds.append(min(1.0, max(0.0, 1.0 - h / log_v)))
    return np.asarray(eds, dtype=np.float64)
