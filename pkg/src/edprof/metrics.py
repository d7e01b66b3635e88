"""Core uniformity metrics: Shannon entropy, entropic deviation (ED), sequence
aggregates, temperature-scaled softmax, Zipfian baselines.

Conventions fixed here and relied on everywhere else:

* all logarithms are natural; entropy is reported in nats;
* ED(p) = 1 - H(p)/ln(V), i.e. the KL divergence from the uniform
  distribution normalized by its maximum value ln(V);
* 0 * log(0) contributes exactly 0 (explicit branch, not float accident);
* accumulation is float64 with numpy's pairwise summation, whatever the
  input dtype (vocabularies run to 256K entries; naive float32 sums lose
  too many digits);
* an incoming probability vector must already sum to 1 within
  ``PROB_SUM_ATOL``; out-of-tolerance input is an error, never silently
  renormalized, because silent renormalization masks upstream bugs.

All functions are pure and safe to call from concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

# Absolute tolerance on sum(p) - 1 for incoming probability vectors.
PROB_SUM_ATOL = 1e-9


def validate_prob_dist(mass) -> np.ndarray:
    """Validate a probability vector and return it as a float64 array.

    Requires: 1-D, length >= 2, finite, nonnegative, sums to 1 within
    ``PROB_SUM_ATOL``. Raises ValidationError otherwise.
    """
    p = np.asarray(mass, dtype=np.float64)
    if p.ndim != 1:
        raise ValidationError(f"probability vector must be 1-D, got shape {p.shape}")
    if p.size < 2:
        raise ValidationError(f"vocabulary size must be >= 2, got {p.size}")
    if not np.isfinite(p).all():
        raise ValidationError("probability vector contains non-finite entries")
    if (p < 0).any():
        raise ValidationError("probability vector contains negative entries")
    total = float(p.sum())
    if abs(total - 1.0) > PROB_SUM_ATOL:
        raise ValidationError(
            f"probability vector sums to {total!r}, outside 1 +/- {PROB_SUM_ATOL}"
        )
    return p


def validate_logits(logits) -> np.ndarray:
    """Validate a raw logit vector and return it as a float64 array."""
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 1:
        raise ValidationError(f"logit vector must be 1-D, got shape {z.shape}")
    if z.size < 2:
        raise ValidationError(f"vocabulary size must be >= 2, got {z.size}")
    if not np.isfinite(z).all():
        raise ValidationError("logit vector contains non-finite entries")
    return z


def entropy(mass) -> float:
    """Shannon entropy of a probability vector, in nats.

    Zero-probability entries contribute exactly 0. Result lies in
    [0, ln(V)].
    """
    p = validate_prob_dist(mass)
    nz = p > 0.0
    terms = np.zeros_like(p)
    terms[nz] = p[nz] * np.log(p[nz])
    return float(-terms.sum())


def ed(mass) -> float:
    """Entropic deviation of a probability vector: 1 - H(p)/ln(V).

    0 for the uniform distribution, 1 for a point mass.
    """
    p = validate_prob_dist(mass)
    return 1.0 - entropy(p) / math.log(p.size)


def kl_from_uniform(mass) -> float:
    """KL divergence D(p || u) in nats, computed directly as sum p_i ln(p_i V).

    Independent of :func:`ed` up to the identity ED = KL / ln(V); kept as a
    separate route so the identity can be cross-checked.
    """
    p = validate_prob_dist(mass)
    v = p.size
    nz = p > 0.0
    terms = np.zeros_like(p)
    terms[nz] = p[nz] * np.log(p[nz] * v)
    return float(terms.sum())


def softmax_with_temperature(logits, temperature: float) -> np.ndarray:
    """Temperature-scaled softmax, computed with max subtraction.

    p_i is proportional to exp(z_i / T). Safe for |z_i| up to well beyond
    1e4; invariant (within 1e-12) under adding a constant to all logits.
    """
    z = validate_logits(logits)
    t = _validate_temperature(temperature)
    s = z / t
    s -= s.max()
    w = np.exp(s)
    return w / w.sum()


def entropy_from_logits(logits, temperature: float = 1.0) -> float:
    """Entropy (nats) of softmax(z / T), computed in log space.

    With s = z/T, m = max(s), w = exp(s - m):
    H = m + ln(sum w) - sum(s * w) / sum(w).
    Avoids materializing probabilities, which underflow for extreme logit
    spreads at vocabulary scale.
    """
    z = validate_logits(logits)
    t = _validate_temperature(temperature)
    s = z / t
    m = float(s.max())
    w = np.exp(s - m)
    total = float(w.sum())
    return m + math.log(total) - float((s * w).sum()) / total


def ed_from_logits(logits, temperature: float = 1.0) -> float:
    """Entropic deviation of softmax(z / T)."""
    z = validate_logits(logits)
    return 1.0 - entropy_from_logits(z, temperature) / math.log(z.size)


@dataclass(frozen=True)
class SequenceEDProfile:
    """Per-position ED values for one generation plus their aggregates.

    ``ed_std`` uses the sample (L-1) denominator by default and is 0 for a
    single-position sequence. Population std is available via the ``ddof``
    argument of the constructors.
    """

    per_position_ed: np.ndarray
    ed_mean: float
    ed_std: float

    def __len__(self) -> int:
        return self.per_position_ed.size


def profile_from_eds(ed_values, ddof: int = 1) -> SequenceEDProfile:
    """Build a SequenceEDProfile from precomputed per-position ED values."""
    e = np.asarray(ed_values, dtype=np.float64)
    if e.ndim != 1 or e.size == 0:
        raise ValidationError("per-position ED sequence must be 1-D and non-empty")
    if not np.isfinite(e).all():
        raise ValidationError("per-position ED sequence contains non-finite values")
    if (e < 0).any() or (e > 1).any():
        raise ValidationError("per-position ED values must lie in [0, 1]")
    mean = float(e.mean())
    std = 0.0 if e.size <= ddof else float(e.std(ddof=ddof))
    return SequenceEDProfile(per_position_ed=e, ed_mean=mean, ed_std=std)


def ed_sequence(per_position_dists, ddof: int = 1) -> SequenceEDProfile:
    """Per-position ED profile of a sequence of probability vectors."""
    dists = list(per_position_dists)
    if not dists:
        raise ValidationError("sequence must contain at least one position")
    eds = np.array([ed(p) for p in dists], dtype=np.float64)
    return profile_from_eds(eds, ddof=ddof)


class EDAccumulator:
    """Single-pass (Welford) accumulator for per-position ED values.

    Matches the batch computation of :func:`ed_sequence` to ~1e-10 while
    holding O(1) state, so whole generations never need to be materialized.
    """

    def __init__(self, ddof: int = 1):
        self._n = 0
        self._mean = 0.0
        self._m2 = 0.0
        self._ddof = ddof

    def add(self, ed_value: float) -> None:
        if not (0.0 <= ed_value <= 1.0):
            raise ValidationError(f"ED value {ed_value!r} outside [0, 1]")
        self._n += 1
        delta = ed_value - self._mean
        self._mean += delta / self._n
        self._m2 += delta * (ed_value - self._mean)

    @property
    def count(self) -> int:
        return self._n

    def mean(self) -> float:
        if self._n == 0:
            raise ValidationError("no values accumulated")
        return self._mean

    def std(self) -> float:
        if self._n == 0:
            raise ValidationError("no values accumulated")
        if self._n <= self._ddof:
            return 0.0
        return math.sqrt(self._m2 / (self._n - self._ddof))


def zipf_ed(alpha: float, vocab_size: int) -> float:
    """ED of a pure power-law (Zipfian) distribution p_i ~ i^-alpha over
    ranks i = 1..V.

    Computed from accumulated sums: with Z = sum(i^-alpha),
    H = ln(Z) + (alpha/Z) * sum(i^-alpha * ln i), then ED = 1 - H/ln(V).
    Direct float64 summation over all V terms; no truncation.
    """
    if not math.isfinite(alpha) or alpha < 0:
        raise ValidationError(f"alpha must be finite and >= 0, got {alpha!r}")
    v = int(vocab_size)
    if v < 2:
        raise ValidationError(f"vocabulary size must be >= 2, got {vocab_size!r}")
    ranks = np.arange(1, v + 1, dtype=np.float64)
    weights = ranks ** (-alpha)
    z = float(weights.sum())
    h = math.log(z) + (alpha / z) * float((weights * np.log(ranks)).sum())
    return 1.0 - h / math.log(v)


def entropy_to_perplexity(h: float) -> float:
    """Perplexity exp(H) of a distribution with entropy H nats."""
    if not math.isfinite(h) or h < 0:
        raise ValidationError(f"entropy must be finite and >= 0, got {h!r}")
    return math.exp(h)


def _validate_temperature(temperature: float) -> float:
    t = float(temperature)
    if not math.isfinite(t) or t <= 0:
        raise ValidationError(f"temperature must be finite and > 0, got {temperature!r}")
    return t
