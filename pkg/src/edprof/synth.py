"""Synthetic logit-stream generator with planted ground truth.

Real-model runs are expensive; the synthetic regimes let the whole
pipeline (streams -> summaries -> battery -> report) be validated against
known parameters on a laptop. Two regimes are shipped:

* ``transformer_like``: level mean flat across temperatures, high
  within-sequence ED spread;
* ``ssm_like``: level mean declines linearly from 0.796 at T=0.7 to 0.440
  at T=1.3 (0.618 at T=1.0 is this generator's own linear-interpolation
  convention), low within-sequence spread.

Per-position ED targets are drawn from a Beta distribution with the
regime's mean/spread, then realized exactly as two-point distributions
(mass w on one peak token, the rest uniform) found by bisection on w.
Streams store raw logits z = T * ln(p), so the downstream
temperature-scaled softmax reconstructs the planted distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .manifest import ManifestRow, write_manifest
from .streamio import (
    PositionRecord,
    StreamHeader,
    ValueKind,
    ValueWidth,
    write_stream_path,
)

REGIMES = ("transformer_like", "ssm_like")

SSM_ED_AT_LOW_T = 0.796  # planted level at T = 0.7
SSM_ED_AT_HIGH_T = 0.440  # planted level at T = 1.3
SSM_T_LOW, SSM_T_HIGH = 0.7, 1.3
SSM_POSITION_STD = 0.15
TRANSFORMER_LEVEL = 0.31
TRANSFORMER_POSITION_STD = 0.44

_ED_CLAMP = 1e-9  # keep planted targets strictly inside (0, 1)


def two_point_entropy(w: float, vocab_size: int) -> float:
    """Entropy of the distribution with mass w on one token and the rest
    spread uniformly."""
    rest = 1.0 - w
    h = 0.0
    if w > 0.0:
        h -= w * math.log(w)
    if rest > 0.0:
        h -= rest * math.log(rest / (vocab_size - 1))
    return h


def two_point_weight_for_ed(target_ed: float, vocab_size: int) -> float:
    """Peak mass w such that the two-point distribution has the target ED.

    ED is strictly increasing in w on [1/V, 1), so bisection converges; the
    achieved ED matches the target to ~1e-12.
    """
    if not 0.0 <= target_ed <= 1.0:
        raise ValidationError(f"target ED {target_ed} outside [0, 1]")
    v = int(vocab_size)
    if v < 2:
        raise ValidationError("vocab_size must be >= 2")
    target = min(max(target_ed, 0.0), 1.0)
    log_v = math.log(v)
    lo, hi = 1.0 / v, 1.0 - 1e-15
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if 1.0 - two_point_entropy(mid, v) / log_v < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _beta_shapes(mean: float, std: float) -> tuple[float, float]:
    var = std * std
    limit = mean * (1.0 - mean)
    if var >= limit:
        raise ValidationError(
            f"position std {std} infeasible for mean {mean} (needs std^2 < m(1-m))"
        )
    nu = limit / var - 1.0
    return mean * nu, (1.0 - mean) * nu


@dataclass(frozen=True)
class RegimeParams:
    regime: str
    vocab_size: int = 2048
    length: int = 160
    gens_per_level: int = 24
    temperatures: tuple[float, ...] = (0.7, 1.0, 1.3)

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValidationError(f"unknown regime {self.regime!r}")
        if self.vocab_size < 2 or self.length < 1 or self.gens_per_level < 1:
            raise ValidationError("vocab_size >= 2, length >= 1, gens_per_level >= 1")
        if not self.temperatures or any(t <= 0 for t in self.temperatures):
            raise ValidationError("temperatures must be positive")

    def level_mean(self, temperature: float) -> float:
        if self.regime == "transformer_like":
            return TRANSFORMER_LEVEL
        slope = (SSM_ED_AT_HIGH_T - SSM_ED_AT_LOW_T) / (SSM_T_HIGH - SSM_T_LOW)
        return SSM_ED_AT_LOW_T + slope * (temperature - SSM_T_LOW)

    @property
    def position_std(self) -> float:
        return (
            TRANSFORMER_POSITION_STD
            if self.regime == "transformer_like"
            else SSM_POSITION_STD
        )

    @property
    def model_name(self) -> str:
        return f"synth-{self.regime}"

    @property
    def architecture(self) -> str:
        return "transformer" if self.regime == "transformer_like" else "ssm"


def planted_position_eds(
    params: RegimeParams, temperature: float, rng: np.random.Generator
) -> np.ndarray:
    mean = params.level_mean(temperature)
    a, b = _beta_shapes(mean, params.position_std)
    eds = rng.beta(a, b, size=params.length)
    return np.clip(eds, _ED_CLAMP, 1.0 - _ED_CLAMP)


def synth_records(
    params: RegimeParams, temperature: float, rng: np.random.Generator
):
    """Yield PositionRecords whose temperature-scaled softmax has the planted
    per-position ED values."""
    v = params.vocab_size
    for pos, target in enumerate(planted_position_eds(params, temperature, rng)):
        w = two_point_weight_for_ed(float(target), v)
        peak = int(rng.integers(0, v))
        rest_logit = temperature * math.log((1.0 - w) / (v - 1))
        logits = np.full(v, rest_logit, dtype=np.float32)
        logits[peak] = np.float32(temperature * math.log(w))
        if rng.random() < w:
            token = peak
        else:
            token = int(rng.integers(0, v - 1))
            if token >= peak:
                token += 1
        yield PositionRecord(
            position_index=pos, values=logits, sampled_token_id=token
        )


def generate_run(
    params: RegimeParams, out_dir, seed: int
) -> tuple[Path, list[ManifestRow]]:
    """Write the synthetic streams plus their manifest; returns the manifest
    path and rows. Deterministic in (params, seed): same inputs, identical
    bytes."""
    out = Path(out_dir)
    streams_dir = out / "streams"
    streams_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    gen_index = 0
    for temperature in params.temperatures:
        for _ in range(params.gens_per_level):
            row_seed = seed + gen_index
            rng = np.random.default_rng(row_seed)
            stream_rel = f"streams/{params.regime}-{gen_index:05d}.edls"
            row = ManifestRow(
                model_name=params.model_name,
                architecture=params.architecture,
                param_count=1_000_000_000,
                vocab_size=params.vocab_size,
                prompt_category="neutral_stub",
                prompt_text_ref=f"synth://{params.regime}",
                language="EN",
                temperature=temperature,
                seed=row_seed,
                generation_index=gen_index,
                stream_path=stream_rel,
            )
            header = StreamHeader(
                vocab_size=params.vocab_size,
                value_kind=ValueKind.RAW_LOGITS,
                value_width=ValueWidth.BINARY32,
                generation_id=f"{params.regime}-{gen_index:05d}",
                position_count_hint=params.length,
                metadata_digest=row.digest(),
            )
            write_stream_path(header, synth_records(params, temperature, rng), out / stream_rel)
            rows.append(row)
            gen_index += 1
    manifest_path = out / "manifest.jsonl"
    write_manifest(rows, manifest_path)
    return manifest_path, rows
