"""The falsification battery: eight pre-registered artifact checks (F1-F8)
plus the headline analyses (intrinsic fraction, neutral-category gradient,
domain-profile convergence, temperature sensitivity, size regression) over a
set of per-generation summaries.

Every test either runs or is explicitly marked skipped with a reason, so a
partial dataset (one model, one temperature, one language) still yields a
complete, honest report. The battery is a pure function of the summary set:
rerunning it produces an identical report.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, RankDeficiencyError, ValidationError
from .manifest import GenerationSummary, NEUTRAL_CATEGORIES, SEMANTIC_CATEGORIES
from .regression import RegressionFit, log_params_regression, ols
from .statistics import (
    TestResult,
    anova_oneway,
    cohens_d,
    durbin_watson,
    kruskal_wallis,
    mann_whitney_u,
    pearson,
    spearman,
    t_one_sample,
    t_paired,
    tukey_hsd,
)

PARTITION_SCHEMES = ("global", "model", "model_category", "model_class")


@dataclass(frozen=True)
class SkipNote:
    """A test that could not run on this dataset, and why."""

    reason: str

    def to_jsonable(self) -> dict:
        return {"skipped": True, "reason": self.reason}


def _jsonable(obj):
    if isinstance(obj, (SkipNote, TestResult, RegressionFit)):
        return obj.to_jsonable()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [float(v) for v in obj]
    if hasattr(obj, "to_jsonable"):
        return obj.to_jsonable()
    return obj


def _by(summaries, key):
    groups = defaultdict(list)
    for s in summaries:
        groups[key(s)].append(s)
    return dict(groups)


def _ed(summaries) -> np.ndarray:
    return np.array([s.ed_mean for s in summaries], dtype=np.float64)


def _partition_key(scheme: str):
    if scheme == "global":
        return lambda s: "all"
    if scheme == "model":
        return lambda s: s.row.model_name
    if scheme == "model_category":
        return lambda s: f"{s.row.model_name}/{s.row.prompt_category}"
    if scheme == "model_class":
        return lambda s: (
            f"{s.row.model_name}/{'neutral' if s.row.is_neutral else 'semantic'}"
        )
    raise ValidationError(f"unknown partition scheme {scheme!r}")


def f1_nonzero(summaries, partition: str = "model_category"):
    """F1: mean ED differs from zero, one-sample t-test per partition."""
    parts = _by(summaries, _partition_key(partition))
    results: dict[str, TestResult | SkipNote] = {}
    counts: dict[str, int] = {}
    for name in sorted(parts):
        group = parts[name]
        counts[name] = len(group)
        if len(group) < 2:
            results[name] = SkipNote("fewer than 2 generations in partition")
            continue
        try:
            results[name] = t_one_sample(_ed(group), 0.0)
        except DegenerateInputError as exc:
            values = _ed(group)
            if np.all(values == 0.0):
                # all-zero ED: cannot distinguish from zero, t = 0 by convention
                results[name] = TestResult(
                    test_name="t_one_sample",
                    statistic=0.0,
                    p_value=1.0,
                    group_sizes=(len(group),),
                    method_notes="all ED values are 0; degenerate zero-variance case",
                )
            else:
                results[name] = SkipNote(str(exc))
    return results, counts


@dataclass(frozen=True)
class DomainTest:
    kruskal: TestResult
    tukey: list[TestResult]
    domain_means: dict[str, float]

    def to_jsonable(self) -> dict:
        return {
            "kruskal": self.kruskal.to_jsonable(),
            "tukey": [t.to_jsonable() for t in self.tukey],
            "domain_means": self.domain_means,
        }


def f2_domains(summaries, alpha: float = 0.05):
    """F2: semantic domains produce different ED (Kruskal-Wallis per model,
    Tukey HSD post-hoc)."""
    out: dict[str, DomainTest | SkipNote] = {}
    for model, group in sorted(_by(
        (s for s in summaries if s.row.prompt_category in SEMANTIC_CATEGORIES),
        lambda s: s.row.model_name,
    ).items()):
        domains = _by(group, lambda s: s.row.prompt_category)
        if len(domains) < 2:
            out[model] = SkipNote("fewer than 2 semantic domains present")
            continue
        labels = sorted(domains)
        groups = [_ed(domains[d]) for d in labels]
        if any(g.size < 2 for g in groups):
            out[model] = SkipNote("a domain has fewer than 2 generations")
            continue
        try:
            kw = kruskal_wallis(groups)
            hsd = tukey_hsd(groups, alpha=alpha, labels=labels)
        except DegenerateInputError as exc:
            out[model] = SkipNote(str(exc))
            continue
        out[model] = DomainTest(
            kruskal=kw,
            tukey=hsd,
            domain_means={d: float(np.mean(_ed(domains[d]))) for d in labels},
        )
    return out


def f3_size_effect(summaries):
    """F3: regression of per-model mean ED on log(parameter count)."""
    models = _by(summaries, lambda s: (s.row.model_name, s.row.param_count))
    if len(models) < 2:
        return SkipNote("need at least 2 models with parameter counts")
    names = sorted(models)
    mean_eds = [float(np.mean(_ed(models[k]))) for k in names]
    params = [k[1] for k in names]
    if len(set(params)) < 2:
        return SkipNote("all models share one parameter count")
    fit = log_params_regression(mean_eds, params)
    if fit.df_resid <= 0:
        fit = RegressionFit(
            coefficients=fit.coefficients,
            standard_errors=fit.standard_errors,
            p_values=fit.p_values,
            r_squared=fit.r_squared,
            residuals=fit.residuals,
            df_resid=fit.df_resid,
            include_intercept=fit.include_intercept,
            method_notes="exact fit with 2 models: no residual df, interpret with care",
        )
    return fit


@dataclass(frozen=True)
class TemperatureSensitivity:
    anova: TestResult
    pearson_r: TestResult
    tukey: list[TestResult]
    level_means: dict[str, float]

    def to_jsonable(self) -> dict:
        return {
            "anova": self.anova.to_jsonable(),
            "pearson_r": self.pearson_r.to_jsonable(),
            "tukey": [t.to_jsonable() for t in self.tukey],
            "level_means": self.level_means,
        }


def f4_temperature(summaries, alpha: float = 0.05):
    """F4: temperature sensitivity per model: one-way ANOVA over temperature
    levels, Pearson r on raw (T, ED) pairs, Tukey HSD between levels."""
    out: dict[str, TemperatureSensitivity | SkipNote] = {}
    for model, group in sorted(_by(summaries, lambda s: s.row.model_name).items()):
        levels = _by(group, lambda s: s.row.temperature)
        if len(levels) < 2:
            out[model] = SkipNote("only one temperature level present")
            continue
        temps = sorted(levels)
        groups = [_ed(levels[t]) for t in temps]
        if any(g.size < 2 for g in groups):
            out[model] = SkipNote("a temperature level has fewer than 2 generations")
            continue
        try:
            aov = anova_oneway(groups)
            hsd = tukey_hsd(groups, alpha=alpha, labels=[str(t) for t in temps])
            r = pearson([s.row.temperature for s in group], _ed(group))
        except DegenerateInputError as exc:
            out[model] = SkipNote(str(exc))
            continue
        out[model] = TemperatureSensitivity(
            anova=aov,
            pearson_r=r,
            tukey=hsd,
            level_means={str(t): float(np.mean(_ed(levels[t]))) for t in temps},
        )
    return out


@dataclass(frozen=True)
class AutocorrelationSummary:
    mean_dw: float
    band_shares: dict[str, float]
    n_series: int
    per_generation: list[TestResult] = field(repr=False, default_factory=list)

    def to_jsonable(self) -> dict:
        return {
            "mean_dw": self.mean_dw,
            "band_shares": self.band_shares,
            "n_series": self.n_series,
        }


def f5_autocorrelation(ed_series_by_model: dict[str, list[np.ndarray]]):
    """F5: Durbin-Watson of each generation's demeaned per-position ED series,
    summarized per model. Series shorter than 3 positions are skipped."""
    out: dict[str, AutocorrelationSummary | SkipNote] = {}
    for model, series_list in sorted(ed_series_by_model.items()):
        results = []
        for series in series_list:
            e = np.asarray(series, dtype=np.float64)
            if e.size < 3:
                continue
            centered = e - e.mean()
            if float((centered**2).sum()) == 0.0:
                continue
            results.append(durbin_watson(centered))
        if not results:
            out[model] = SkipNote("no series long enough for autocorrelation")
            continue
        stats = np.array([r.statistic for r in results])
        out[model] = AutocorrelationSummary(
            mean_dw=float(stats.mean()),
            band_shares={
                "positive": float((stats < 1.5).mean()),
                "none": float(((stats >= 1.5) & (stats <= 2.5)).mean()),
                "negative": float((stats > 2.5).mean()),
            },
            n_series=len(results),
            per_generation=results,
        )
    return out


def category_means(summaries, categories) -> dict[str, float]:
    cats = _by(
        (s for s in summaries if s.row.prompt_category in categories),
        lambda s: s.row.prompt_category,
    )
    return {c: float(np.mean(_ed(g))) for c, g in sorted(cats.items())}


def f6_intrinsic_fraction(summaries):
    """F6: neutral-prompt mean ED as a fraction of semantic-prompt mean ED,
    per model. Category means are unweighted (each category counts once)."""
    out: dict[str, float | SkipNote] = {}
    for model, group in sorted(_by(summaries, lambda s: s.row.model_name).items()):
        neutral = category_means(group, NEUTRAL_CATEGORIES)
        semantic = category_means(group, SEMANTIC_CATEGORIES)
        if not neutral or not semantic:
            out[model] = SkipNote("need both neutral and semantic categories")
            continue
        sem_mean = float(np.mean(list(semantic.values())))
        if sem_mean == 0.0:
            out[model] = SkipNote("semantic mean ED is zero")
            continue
        out[model] = float(np.mean(list(neutral.values()))) / sem_mean
    return out


@dataclass(frozen=True)
class MultilingualGradient:
    kruskal: TestResult
    language_means: dict[str, float]
    ordering: list[str]
    pairwise_mw: dict[str, TestResult]
    cohens_d_vs_baseline: dict[str, float]
    baseline: str

    def to_jsonable(self) -> dict:
        return {
            "kruskal": self.kruskal.to_jsonable(),
            "language_means": self.language_means,
            "ordering": self.ordering,
            "pairwise_mw": {k: v.to_jsonable() for k, v in self.pairwise_mw.items()},
            "cohens_d_vs_baseline": self.cohens_d_vs_baseline,
            "baseline": self.baseline,
        }


def f7_multilingual(summaries, baseline_language: str = "EN"):
    """F7: ED gradient across languages: Kruskal-Wallis, all pairwise
    Mann-Whitney tests, Cohen's d against the baseline language."""
    langs = _by(summaries, lambda s: s.row.language)
    langs = {k: v for k, v in langs.items() if len(v) >= 2}
    if len(langs) < 2:
        return SkipNote("fewer than 2 languages with >= 2 generations")
    names = sorted(langs)
    groups = {k: _ed(langs[k]) for k in names}
    try:
        kw = kruskal_wallis([groups[k] for k in names])
    except DegenerateInputError as exc:
        return SkipNote(str(exc))
    means = {k: float(groups[k].mean()) for k in names}
    pairwise = {}
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            pairwise[f"{a}-{b}"] = mann_whitney_u(groups[a], groups[b])
    base = baseline_language if baseline_language in groups else min(means, key=means.get)
    d_vs_base = {}
    for k in names:
        if k == base:
            continue
        try:
            d_vs_base[k] = cohens_d(groups[k], groups[base])
        except DegenerateInputError:
            d_vs_base[k] = math.nan
    return MultilingualGradient(
        kruskal=kw,
        language_means=means,
        ordering=sorted(names, key=lambda k: means[k]),
        pairwise_mw=pairwise,
        cohens_d_vs_baseline=d_vs_base,
        baseline=base,
    )


def f8_drift(summaries):
    """F8: regression of ED on generation order with temperature as covariate.
    Falls back to index-only if temperature is constant; skips when the index
    itself is constant."""
    if len(summaries) < 3:
        return SkipNote("fewer than 3 generations")
    y = _ed(summaries)
    idx = np.array([s.row.generation_index for s in summaries], dtype=np.float64)
    temps = np.array([s.row.temperature for s in summaries], dtype=np.float64)
    try:
        if np.all(temps == temps[0]):
            fit = ols(y, idx, include_intercept=True)
            notes = "temperature constant, dropped as covariate"
        else:
            fit = ols(y, np.column_stack([idx, temps]), include_intercept=True)
            notes = "temperature included as covariate"
    except RankDeficiencyError:
        return SkipNote("generation_index has no variation (rank-deficient design)")
    return RegressionFit(
        coefficients=fit.coefficients,
        standard_errors=fit.standard_errors,
        p_values=fit.p_values,
        r_squared=fit.r_squared,
        residuals=fit.residuals,
        df_resid=fit.df_resid,
        include_intercept=fit.include_intercept,
        method_notes=notes,
    )


def domain_profile_convergence(profiles: dict[str, dict[str, float]]):
    """Spearman correlation matrix between per-model domain-level ED profiles.

    Accepts arbitrary profile granularity (the keys just have to match
    across models); only keys shared by a pair enter that pair's rank
    correlation.
    """
    models = sorted(profiles)
    if len(models) < 2:
        return SkipNote("need at least 2 model profiles")
    matrix: dict[str, TestResult | SkipNote] = {}
    for i, a in enumerate(models):
        for b in models[i + 1 :]:
            common = sorted(set(profiles[a]) & set(profiles[b]))
            if len(common) < 3:
                matrix[f"{a}|{b}"] = SkipNote("fewer than 3 shared profile points")
                continue
            xa = [profiles[a][k] for k in common]
            xb = [profiles[b][k] for k in common]
            try:
                matrix[f"{a}|{b}"] = spearman(xa, xb)
            except DegenerateInputError as exc:
                matrix[f"{a}|{b}"] = SkipNote(str(exc))
    return matrix


def model_domain_profiles(summaries) -> dict[str, dict[str, float]]:
    """Per-model mapping of semantic domain -> mean ED."""
    out = {}
    for model, group in _by(
        (s for s in summaries if s.row.prompt_category in SEMANTIC_CATEGORIES),
        lambda s: s.row.model_name,
    ).items():
        out[model] = category_means(group, SEMANTIC_CATEGORIES)
    return out


@dataclass(frozen=True)
class NeutralGradient:
    category_means: dict[str, dict[str, float]]  # model -> category -> mean ED
    random_vs_empty: dict[str, TestResult | SkipNote]  # paired t per model

    def to_jsonable(self) -> dict:
        return {
            "category_means": self.category_means,
            "random_vs_empty": {
                k: v.to_jsonable() for k, v in self.random_vs_empty.items()
            },
        }


def neutral_gradient(summaries):
    """Neutral-category ED means per model, plus the random-ascii vs empty
    paired t-test (pairing on (temperature, seed))."""
    models = _by(
        (s for s in summaries if s.row.is_neutral), lambda s: s.row.model_name
    )
    if not models:
        return SkipNote("no neutral-category generations present")
    means = {}
    paired: dict[str, TestResult | SkipNote] = {}
    for model, group in sorted(models.items()):
        means[model] = category_means(group, NEUTRAL_CATEGORIES)
        by_key = {}
        for s in group:
            by_key.setdefault((s.row.temperature, s.row.seed), {})[
                s.row.prompt_category
            ] = s.ed_mean
        pairs = [
            (v["random_ascii"], v["empty"])
            for v in by_key.values()
            if "random_ascii" in v and "empty" in v
        ]
        if len(pairs) < 2:
            paired[model] = SkipNote(
                "fewer than 2 (random_ascii, empty) pairs with shared (T, seed)"
            )
            continue
        x = [p[0] for p in pairs]
        y = [p[1] for p in pairs]
        try:
            paired[model] = t_paired(x, y)
        except DegenerateInputError as exc:
            paired[model] = SkipNote(str(exc))
    return NeutralGradient(category_means=means, random_vs_empty=paired)


@dataclass
class BatteryReport:
    input_count: int
    partition_scheme: str
    alpha: float
    f1: dict
    f1_partition_counts: dict
    f2: dict
    f3: object
    f4: dict
    f5: dict
    f6: dict
    f7: object
    f8: object
    domain_profiles: dict
    domain_convergence: object
    neutral: object

    def to_jsonable(self) -> dict:
        return {
            "input_count": self.input_count,
            "partition_scheme": self.partition_scheme,
            "alpha": self.alpha,
            "f1_nonzero": _jsonable(self.f1),
            "f1_partition_counts": self.f1_partition_counts,
            "f2_domains": _jsonable(self.f2),
            "f3_size_effect": _jsonable(self.f3),
            "f4_temperature": _jsonable(self.f4),
            "f5_autocorrelation": _jsonable(self.f5),
            "f6_intrinsic_fraction": _jsonable(self.f6),
            "f7_multilingual": _jsonable(self.f7),
            "f8_drift": _jsonable(self.f8),
            "domain_profiles": _jsonable(self.domain_profiles),
            "domain_convergence": _jsonable(self.domain_convergence),
            "neutral_gradient": _jsonable(self.neutral),
        }


ALL_ANALYSES = ("f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "domains", "neutral")


def run_battery(
    summaries: list[GenerationSummary],
    ed_series_by_model: dict[str, list[np.ndarray]] | None = None,
    partition: str = "model_category",
    alpha: float = 0.05,
    analyses: tuple[str, ...] | None = None,
) -> BatteryReport:
    """Run every selected, applicable test over the summary set.

    ``ed_series_by_model`` supplies per-position ED series for F5; when
    absent, F5 is skipped with a reason. Unselected analyses are marked
    skipped rather than omitted. The report is deterministic in its inputs.
    """
    if partition not in PARTITION_SCHEMES:
        raise ValidationError(f"unknown partition scheme {partition!r}")
    selected = set(ALL_ANALYSES if analyses is None else analyses)
    unknown = selected - set(ALL_ANALYSES)
    if unknown:
        raise ValidationError(f"unknown analyses: {sorted(unknown)}")
    not_selected = SkipNote("analysis not selected")
    if not summaries:
        empty = SkipNote("no summaries supplied")
        return BatteryReport(
            input_count=0,
            partition_scheme=partition,
            alpha=alpha,
            f1={}, f1_partition_counts={},
            f2={}, f3=empty, f4={}, f5={}, f6={}, f7=empty, f8=empty,
            domain_profiles={}, domain_convergence=empty, neutral=empty,
        )
    if "f1" in selected:
        f1, f1_counts = f1_nonzero(summaries, partition)
        if sum(f1_counts.values()) != len(summaries):
            raise ValidationError("partition counts do not sum to the input count")
    else:
        f1, f1_counts = {"all": not_selected}, {}
    if "f5" not in selected:
        f5 = {"all": not_selected}
    elif ed_series_by_model is None:
        f5 = {"all": SkipNote("no per-position ED series supplied")}
    else:
        f5 = f5_autocorrelation(ed_series_by_model)
    if "domains" in selected:
        profiles = model_domain_profiles(summaries)
        convergence = domain_profile_convergence(profiles)
    else:
        profiles, convergence = {}, not_selected
    return BatteryReport(
        input_count=len(summaries),
        partition_scheme=partition,
        alpha=alpha,
        f1=f1,
        f1_partition_counts=f1_counts,
        f2=f2_domains(summaries, alpha=alpha) if "f2" in selected else {"all": not_selected},
        f3=f3_size_effect(summaries) if "f3" in selected else not_selected,
        f4=f4_temperature(summaries, alpha=alpha) if "f4" in selected else {"all": not_selected},
        f5=f5,
        f6=f6_intrinsic_fraction(summaries) if "f6" in selected else {"all": not_selected},
        f7=f7_multilingual(summaries) if "f7" in selected else not_selected,
        f8=f8_drift(summaries) if "f8" in selected else not_selected,
        domain_profiles=profiles,
        domain_convergence=convergence,
        neutral=neutral_gradient(summaries) if "neutral" in selected else not_selected,
    )
