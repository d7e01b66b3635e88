"""Writer for the `.edls` stream format and the manifest row schema.

Implemented independently from the profiler package, straight from the
published byte layout (docs/edls-format.md in the profiler repo): the
conformance tests meet the profiler's reader at the byte level, which is
the whole point of a documented format. Little-endian throughout.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass

import numpy as np

MAGIC = b"EDLS"
FORMAT_VERSION = 1
KIND_RAW_LOGITS = 0
KIND_PROBABILITIES = 1
WIDTH_BINARY32 = 4
WIDTH_BINARY64 = 8

_FIXED_HEADER = struct.Struct("<4sHBBIIQH")

MANIFEST_FIELDS = (
    "model_name",
    "architecture",
    "param_count",
    "vocab_size",
    "prompt_category",
    "prompt_text_ref",
    "language",
    "temperature",
    "seed",
    "generation_index",
    "stream_path",
)


def checksum64(data: bytes, state: tuple[int, int] = (0, 1)) -> tuple[int, int]:
    """Running (crc32, adler32) state; combine() turns it into the u64."""
    crc, adler = state
    return zlib.crc32(data, crc), zlib.adler32(data, adler)


def combine(state: tuple[int, int]) -> int:
    crc, adler = state
    return (crc << 32) | adler


@dataclass
class StreamWriter:
    """Incremental `.edls` writer. Call add() per position, then finish()."""

    sink: object
    vocab_size: int
    generation_id: str
    value_width: int = WIDTH_BINARY32
    position_count_hint: int = 0
    metadata_digest: int = 0

    def __post_init__(self):
        if self.vocab_size < 2:
            raise ValueError("vocab_size must be >= 2")
        gid = self.generation_id.encode("utf-8")
        header = _FIXED_HEADER.pack(
            MAGIC,
            FORMAT_VERSION,
            KIND_RAW_LOGITS,
            self.value_width,
            self.vocab_size,
            self.position_count_hint,
            self.metadata_digest,
            len(gid),
        ) + gid
        self._state = checksum64(header)
        self.sink.write(header)
        self._next_index = 0
        self._dtype = np.dtype("<f4") if self.value_width == WIDTH_BINARY32 else np.dtype("<f8")

    def add(self, values: np.ndarray, sampled_token_id: int) -> None:
        arr = np.ascontiguousarray(values, dtype=self._dtype)
        if arr.ndim != 1 or arr.size != self.vocab_size:
            raise ValueError(
                f"expected {self.vocab_size} values, got shape {arr.shape}"
            )
        if not np.isfinite(arr).all():
            raise ValueError(f"non-finite logit at position {self._next_index}")
        body = struct.pack("<II", self._next_index, sampled_token_id) + arr.tobytes()
        prefix = struct.pack("<I", len(body))
        self._state = checksum64(body, checksum64(prefix, self._state))
        self.sink.write(prefix)
        self.sink.write(body)
        self._next_index += 1

    def finish(self) -> int:
        self.sink.write(struct.pack("<I", 0))
        self.sink.write(struct.pack("<Q", combine(self._state)))
        return self._next_index


def manifest_row(**fields) -> dict:
    missing = [k for k in MANIFEST_FIELDS if k not in fields]
    if missing:
        raise ValueError(f"manifest row missing fields: {missing}")
    return {k: fields[k] for k in MANIFEST_FIELDS}


def row_to_json(row: dict) -> str:
    return json.dumps({k: row[k] for k in MANIFEST_FIELDS}, ensure_ascii=False)


def row_digest(row: dict) -> int:
    return combine(checksum64(row_to_json(row).encode("utf-8")))


def write_manifest(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(row_to_json(row))
            fh.write("\n")
