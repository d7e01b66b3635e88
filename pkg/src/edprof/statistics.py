"""Hypothesis tests and effect sizes used by the falsification battery.

Conventions: ties get mid-ranks everywhere; Kruskal-Wallis and
Mann-Whitney carry the standard tie-correction factors; p-values are
two-sided unless noted. Degenerate inputs (zero variance feeding a ratio,
groups too small) raise DegenerateInputError instead of returning NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import distributions as dist
from .errors import DegenerateInputError, ValidationError

# Switch point between exact-enumeration and normal-approximation p-values
# for the Mann-Whitney U test.
MANN_WHITNEY_EXACT_MAX_N = 12


@dataclass(frozen=True)
class TestResult:
    """Outcome of one statistical test."""

    test_name: str
    statistic: float
    p_value: float | None
    effect_size: float | None = None
    df: float | tuple[float, ...] | None = None
    group_sizes: tuple[int, ...] | None = None
    method_notes: str = ""
    significant: bool | None = None

    def to_jsonable(self) -> dict:
        return {
            "test_name": self.test_name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "effect_size": self.effect_size,
            "df": list(self.df) if isinstance(self.df, tuple) else self.df,
            "group_sizes": list(self.group_sizes) if self.group_sizes else None,
            "method_notes": self.method_notes,
            "significant": self.significant,
        }


def _as_sample(x, name: str, min_n: int = 1) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 1:
        raise ValidationError(f"{name} must be 1-D, got shape {a.shape}")
    if a.size < min_n:
        raise DegenerateInputError(f"{name} needs at least {min_n} values, got {a.size}")
    if not np.isfinite(a).all():
        raise ValidationError(f"{name} contains non-finite values")
    return a


def rankdata(values) -> np.ndarray:
    """Mid-ranks of a sample (ties share the average of their rank block)."""
    a = np.asarray(values, dtype=np.float64)
    order = np.argsort(a, kind="stable")
    ranks = np.empty(a.size, dtype=np.float64)
    sorted_a = a[order]
    i = 0
    while i < a.size:
        j = i
        while j + 1 < a.size and sorted_a[j + 1] == sorted_a[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _tie_counts(pooled: np.ndarray) -> np.ndarray:
    _, counts = np.unique(pooled, return_counts=True)
    return counts[counts > 1]


def t_one_sample(x, mu0: float) -> TestResult:
    """One-sample two-sided t-test of mean(x) against mu0."""
    a = _as_sample(x, "sample", min_n=2)
    s = a.std(ddof=1)
    if s == 0.0:
        raise DegenerateInputError("one-sample t-test: sample has zero variance")
    t = (a.mean() - mu0) / (s / math.sqrt(a.size))
    df = a.size - 1
    return TestResult(
        test_name="t_one_sample",
        statistic=float(t),
        p_value=dist.t_two_sided_p(t, df),
        df=float(df),
        group_sizes=(a.size,),
    )


def t_paired(x, y) -> TestResult:
    """Paired two-sided t-test on the differences x - y."""
    a = _as_sample(x, "x", min_n=2)
    b = _as_sample(y, "y", min_n=2)
    if a.size != b.size:
        raise ValidationError("paired t-test requires equal-length samples")
    r = t_one_sample(a - b, 0.0)
    return TestResult(
        test_name="t_paired",
        statistic=r.statistic,
        p_value=r.p_value,
        df=r.df,
        group_sizes=(a.size,),
    )


def _validated_groups(groups, min_groups: int, min_per_group: int = 1):
    gs = [_as_sample(g, f"group {i}", min_n=min_per_group) for i, g in enumerate(groups)]
    if len(gs) < min_groups:
        raise DegenerateInputError(f"need at least {min_groups} groups, got {len(gs)}")
    return gs


def kruskal_wallis(groups) -> TestResult:
    """Kruskal-Wallis H test with tie correction; p via chi-square, df = k-1."""
    gs = _validated_groups(groups, min_groups=2)
    sizes = np.array([g.size for g in gs])
    pooled = np.concatenate(gs)
    n = pooled.size
    ranks = rankdata(pooled)
    h = 0.0
    start = 0
    for size in sizes:
        rbar = ranks[start : start + size].mean()
        h += size * (rbar - (n + 1) / 2.0) ** 2
        start += size
    h *= 12.0 / (n * (n + 1))
    ties = _tie_counts(pooled)
    correction = 1.0 - float((ties**3 - ties).sum()) / (n**3 - n)
    notes = "mid-rank ties, chi-square approximation"
    if correction == 0.0:
        # every pooled value identical: no evidence of any difference
        h, p = 0.0, 1.0
        notes += "; all values tied"
    else:
        h /= correction
        p = dist.chi2_sf(h, len(gs) - 1)
    return TestResult(
        test_name="kruskal_wallis",
        statistic=float(h),
        p_value=p,
        df=float(len(gs) - 1),
        group_sizes=tuple(int(s) for s in sizes),
        method_notes=notes,
    )


def anova_oneway(groups) -> TestResult:
    """One-way fixed-effects ANOVA."""
    gs = _validated_groups(groups, min_groups=2, min_per_group=2)
    sizes = np.array([g.size for g in gs])
    n = int(sizes.sum())
    k = len(gs)
    grand = np.concatenate(gs).mean()
    ssb = float(sum(g.size * (g.mean() - grand) ** 2 for g in gs))
    ssw = float(sum(((g - g.mean()) ** 2).sum() for g in gs))
    if ssw == 0.0:
        raise DegenerateInputError("ANOVA: zero within-group variance")
    f = (ssb / (k - 1)) / (ssw / (n - k))
    return TestResult(
        test_name="anova_oneway",
        statistic=float(f),
        p_value=dist.f_sf(f, k - 1, n - k),
        df=(float(k - 1), float(n - k)),
        group_sizes=tuple(int(s) for s in sizes),
    )


def tukey_hsd(groups, alpha: float = 0.05, labels=None) -> list[TestResult]:
    """All pairwise Tukey HSD (Tukey-Kramer for unequal sizes) comparisons.

    The studentized range tail is integrated numerically; effect_size is the
    raw mean difference (group i - group j).
    """
    gs = _validated_groups(groups, min_groups=2, min_per_group=2)
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")
    k = len(gs)
    names = list(labels) if labels is not None else [str(i) for i in range(k)]
    if len(names) != k:
        raise ValidationError("labels length must match group count")
    n = sum(g.size for g in gs)
    df_err = n - k
    mse = sum(((g - g.mean()) ** 2).sum() for g in gs) / df_err
    means = [g.mean() for g in gs]
    results = []
    for i, j in combinations(range(k), 2):
        diff = float(means[i] - means[j])
        if diff == 0.0:
            q, p = 0.0, 1.0
        else:
            if mse == 0.0:
                raise DegenerateInputError(
                    "Tukey HSD: zero pooled variance with unequal means"
                )
            se = math.sqrt(mse / 2.0 * (1.0 / gs[i].size + 1.0 / gs[j].size))
            q = abs(diff) / se
            p = dist.studentized_range_sf(q, k, df_err)
        results.append(
            TestResult(
                test_name=f"tukey_hsd[{names[i]}-{names[j]}]",
                statistic=float(q),
                p_value=p,
                effect_size=diff,
                df=float(df_err),
                group_sizes=(gs[i].size, gs[j].size),
                method_notes=f"alpha={alpha}",
                significant=p <= alpha,
            )
        )
    return results


def _mann_whitney_u_of(ranks: np.ndarray, idx, n1: int) -> float:
    return float(ranks[idx].sum() - n1 * (n1 + 1) / 2.0)


def mann_whitney_u(x, y) -> TestResult:
    """Mann-Whitney U test (two-sided).

    Exact enumeration of the permutation distribution when n1 + n2 <=
    MANN_WHITNEY_EXACT_MAX_N (ties included); otherwise normal
    approximation with tie correction and continuity correction.
    Statistic is U for the first sample; U_x + U_y = n1 * n2.
    """
    a = _as_sample(x, "x")
    b = _as_sample(y, "y")
    n1, n2 = a.size, b.size
    pooled = np.concatenate([a, b])
    ranks = rankdata(pooled)
    u_x = _mann_whitney_u_of(ranks, np.arange(n1), n1)
    mu = n1 * n2 / 2.0
    if n1 + n2 <= MANN_WHITNEY_EXACT_MAX_N:
        hits = 0
        total = 0
        for idx in combinations(range(n1 + n2), n1):
            u = _mann_whitney_u_of(ranks, list(idx), n1)
            total += 1
            if abs(u - mu) >= abs(u_x - mu):
                hits += 1
        p = hits / total
        notes = f"exact enumeration over C({n1 + n2},{n1}) splits"
    else:
        ties = _tie_counts(pooled)
        n = n1 + n2
        tie_term = float((ties**3 - ties).sum()) / (n * (n - 1))
        var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
        if var <= 0.0:
            raise DegenerateInputError("Mann-Whitney: all pooled values tied")
        z = (abs(u_x - mu) - 0.5) / math.sqrt(var)
        z = max(z, 0.0)
        p = min(1.0, 2.0 * (1.0 - dist.normal_cdf(z)))
        notes = "normal approximation, tie + continuity correction"
    return TestResult(
        test_name="mann_whitney_u",
        statistic=u_x,
        p_value=p,
        df=None,
        group_sizes=(n1, n2),
        method_notes=notes,
    )


# Interpretive bands for the Durbin-Watson statistic.
DW_POSITIVE_BELOW = 1.5
DW_NEGATIVE_ABOVE = 2.5


def durbin_watson(residuals) -> TestResult:
    """Durbin-Watson statistic of a residual series. No p-value; the
    method notes carry the interpretive band (<1.5 positive autocorrelation,
    >2.5 negative)."""
    e = _as_sample(residuals, "residual series", min_n=2)
    denom = float((e**2).sum())
    if denom == 0.0:
        raise DegenerateInputError("Durbin-Watson: residuals are all zero")
    dw = float((np.diff(e) ** 2).sum()) / denom
    if dw < DW_POSITIVE_BELOW:
        band = "positive autocorrelation band"
    elif dw > DW_NEGATIVE_ABOVE:
        band = "negative autocorrelation band"
    else:
        band = "no-autocorrelation band"
    return TestResult(
        test_name="durbin_watson",
        statistic=dw,
        p_value=None,
        group_sizes=(e.size,),
        method_notes=band,
    )


def pearson(x, y) -> TestResult:
    """Pearson product-moment correlation; p via the t approximation."""
    a = _as_sample(x, "x", min_n=2)
    b = _as_sample(y, "y", min_n=2)
    if a.size != b.size:
        raise ValidationError("correlation requires equal-length samples")
    sa, sb = a.std(ddof=1), b.std(ddof=1)
    if sa == 0.0 or sb == 0.0:
        raise DegenerateInputError("Pearson correlation: zero-variance input")
    r = float(((a - a.mean()) * (b - b.mean())).sum() / ((a.size - 1) * sa * sb))
    r = max(-1.0, min(1.0, r))
    return TestResult(
        test_name="pearson",
        statistic=r,
        p_value=_correlation_p(r, a.size),
        df=float(a.size - 2),
        group_sizes=(a.size,),
    )


def spearman(x, y) -> TestResult:
    """Spearman rank correlation (mid-rank ties); p via the t approximation."""
    a = _as_sample(x, "x", min_n=2)
    b = _as_sample(y, "y", min_n=2)
    if a.size != b.size:
        raise ValidationError("correlation requires equal-length samples")
    ra, rb = rankdata(a), rankdata(b)
    if np.all(ra == ra[0]) or np.all(rb == rb[0]):
        raise DegenerateInputError("Spearman correlation: constant ranks")
    inner = pearson(ra, rb)
    return TestResult(
        test_name="spearman",
        statistic=inner.statistic,
        p_value=inner.p_value,
        df=inner.df,
        group_sizes=(a.size,),
        method_notes="mid-rank ties, t approximation",
    )


def _correlation_p(r: float, n: int) -> float | None:
    if n <= 2:
        return None
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return dist.t_two_sided_p(t, n - 2)


def cohens_d(x, y) -> float:
    """Cohen's d with the pooled sample standard deviation."""
    a = _as_sample(x, "x", min_n=2)
    b = _as_sample(y, "y", min_n=2)
    pooled_var = (
        (a.size - 1) * a.var(ddof=1) + (b.size - 1) * b.var(ddof=1)
    ) / (a.size + b.size - 2)
    if pooled_var == 0.0:
        raise DegenerateInputError("Cohen's d: zero pooled variance")
    return float((a.mean() - b.mean()) / math.sqrt(pooled_var))
