"""Experiment manifest (JSON-lines) and per-generation summaries.

A manifest row declares one generation of the run matrix:
model x prompt x temperature x seed. Streams are separate `.edls` files
referenced by path, relative to the manifest file's directory, so a run
directory can be moved wholesale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Iterable

from .errors import ValidationError
from .streamio import checksum64

ARCHITECTURES = ("transformer", "ssm")
LANGUAGES = ("EN", "JA", "ZH", "PL", "AR", "other")
SEMANTIC_CATEGORIES = ("wikipedia", "news", "fiction", "code")
NEUTRAL_CATEGORIES = (
    "empty",
    "random_ascii",
    "explicit_randomness",
    "neutral_stub",
    "nonsense_syllables",
)
PROMPT_CATEGORIES = SEMANTIC_CATEGORIES + NEUTRAL_CATEGORIES

_ROW_FIELDS = (
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


@dataclass(frozen=True)
class ManifestRow:
    model_name: str
    architecture: str
    param_count: int
    vocab_size: int
    prompt_category: str
    prompt_text_ref: str
    language: str
    temperature: float
    seed: int
    generation_index: int
    stream_path: str

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValidationError(f"unknown architecture {self.architecture!r}")
        if self.prompt_category not in PROMPT_CATEGORIES:
            raise ValidationError(f"unknown prompt_category {self.prompt_category!r}")
        if self.language not in LANGUAGES:
            raise ValidationError(f"unknown language {self.language!r}")
        if self.param_count < 1:
            raise ValidationError("param_count must be positive")
        if self.vocab_size < 2:
            raise ValidationError("vocab_size must be >= 2")
        if not self.temperature > 0:
            raise ValidationError("temperature must be > 0")
        if self.seed < 0 or self.seed >= 2**64:
            raise ValidationError("seed out of u64 range")
        if self.generation_index < 0 or self.generation_index >= 2**32:
            raise ValidationError("generation_index out of u32 range")

    def to_json(self) -> str:
        d = asdict(self)
        return json.dumps({k: d[k] for k in _ROW_FIELDS}, ensure_ascii=False)

    def digest(self) -> int:
        """64-bit checksum of the canonical row serialization; stored in the
        stream header so a stream can be matched back to its row."""
        return checksum64(self.to_json().encode("utf-8"))

    @classmethod
    def from_json(cls, line: str) -> "ManifestRow":
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"manifest line is not valid JSON: {exc}") from exc
        missing = [k for k in _ROW_FIELDS if k not in raw]
        if missing:
            raise ValidationError(f"manifest row missing fields: {missing}")
        try:
            return cls(
                model_name=str(raw["model_name"]),
                architecture=str(raw["architecture"]),
                param_count=int(raw["param_count"]),
                vocab_size=int(raw["vocab_size"]),
                prompt_category=str(raw["prompt_category"]),
                prompt_text_ref=str(raw["prompt_text_ref"]),
                language=str(raw["language"]),
                temperature=float(raw["temperature"]),
                seed=int(raw["seed"]),
                generation_index=int(raw["generation_index"]),
                stream_path=str(raw["stream_path"]),
            )
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"manifest row has ill-typed field: {exc}") from exc

    @property
    def is_neutral(self) -> bool:
        return self.prompt_category in NEUTRAL_CATEGORIES


def write_manifest(rows: Iterable[ManifestRow], path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(row.to_json())
            fh.write("\n")


def load_manifest(path) -> list[ManifestRow]:
    """Load and validate a manifest: per-row field checks plus the
    run-level uniqueness constraints."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"manifest not found: {path}")
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append(ManifestRow.from_json(line))
            except ValidationError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    seen_keys = set()
    seen_indices = set()
    for row in rows:
        key = (row.model_name, row.prompt_text_ref, row.temperature, row.seed)
        if key in seen_keys:
            raise ValidationError(
                f"duplicate (model, prompt, temperature, seed) row: {key}"
            )
        seen_keys.add(key)
        if row.generation_index in seen_indices:
            raise ValidationError(
                f"duplicate generation_index {row.generation_index}"
            )
        seen_indices.add(row.generation_index)
    return rows


def resolve_stream_path(manifest_path, row: ManifestRow) -> Path:
    p = Path(row.stream_path)
    return p if p.is_absolute() else Path(manifest_path).parent / p


@dataclass(frozen=True)
class GenerationSummary:
    """Per-generation ED aggregates joined with the manifest row."""

    row: ManifestRow
    ed_mean: float
    ed_std: float
    length: int
    unique_token_count: int
    mean_entropy: float

    def __post_init__(self):
        if not 0.0 <= self.ed_mean <= 1.0:
            raise ValidationError(f"ed_mean {self.ed_mean} outside [0, 1]")
        if self.ed_std < 0.0:
            raise ValidationError("ed_std must be >= 0")
        if self.unique_token_count > self.length:
            raise ValidationError("unique_token_count cannot exceed length")

    def to_json(self) -> str:
        d = {k: getattr(self.row, k) for k in _ROW_FIELDS}
        d.update(
            status="ok",
            ed_mean=self.ed_mean,
            ed_std=self.ed_std,
            length=self.length,
            unique_token_count=self.unique_token_count,
            mean_entropy=self.mean_entropy,
        )
        return json.dumps(d, ensure_ascii=False)


def summary_from_json(line: str) -> GenerationSummary | None:
    """Parse one summaries-file line; returns None for failed rows."""
    raw = json.loads(line)
    if raw.get("status") != "ok":
        return None
    row = ManifestRow(**{k: raw[k] for k in _ROW_FIELDS})
    return GenerationSummary(
        row=row,
        ed_mean=float(raw["ed_mean"]),
        ed_std=float(raw["ed_std"]),
        length=int(raw["length"]),
        unique_token_count=int(raw["unique_token_count"]),
        mean_entropy=float(raw["mean_entropy"]),
    )


def load_summaries(path) -> list[GenerationSummary]:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"summaries file not found: {path}")
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parsed = summary_from_json(line)
            if parsed is not None:
                out.append(parsed)
    return out
