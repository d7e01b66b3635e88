"""Machine-readable tables and plot-data series from a battery report.

Everything is CSV (no chart rendering): one table per analysis plus the
series files a plotting tool would consume. Emission is idempotent and
deterministic: identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .manifest import GenerationSummary, NEUTRAL_CATEGORIES

# Schemas (column order is the contract; see README):
TABLES = {
    "falsification_tests.csv": (
        "test", "scope", "statistic", "p_value", "effect_size",
        "significant", "skipped", "notes",
    ),
    "neutral_gradient.csv": ("model", "category", "mean_ed"),
    "domain_profiles.csv": ("model", "domain", "mean_ed"),
    "domain_convergence.csv": ("model_pair", "spearman_rho", "p_value"),
    "intrinsic_fraction.csv": ("model", "intrinsic_fraction"),
    "multilingual.csv": (
        "language", "n", "mean_ed", "mean_unique_tokens", "cohens_d_vs_baseline",
    ),
    "temperature_series.csv": ("model", "temperature", "mean_ed", "n"),
    "ed_by_category_series.csv": ("model", "category", "prompt_class", "mean_ed", "n"),
    "size_regression.csv": ("model", "param_count", "mean_ed"),
}


def _write_csv(path: Path, name: str, rows) -> None:
    header = TABLES[name]
    with open(path / name, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _test_rows(report: dict):
    """Flatten every TestResult / skip in the battery JSON into table rows."""

    def result_row(test, scope, payload):
        if payload is None:
            return None
        if payload.get("skipped"):
            return (test, scope, "", "", "", "", "true", payload.get("reason", ""))
        return (
            test,
            scope,
            repr(payload.get("statistic", "")),
            "" if payload.get("p_value") is None else repr(payload["p_value"]),
            "" if payload.get("effect_size") is None else repr(payload["effect_size"]),
            "" if payload.get("significant") is None else str(payload["significant"]).lower(),
            "false",
            payload.get("method_notes", ""),
        )

    rows = []
    for part, res in sorted(report.get("f1_nonzero", {}).items()):
        rows.append(result_row("F1", part, res))
    for model, res in sorted(report.get("f2_domains", {}).items()):
        if res.get("skipped"):
            rows.append(result_row("F2", model, res))
        else:
            rows.append(result_row("F2", model, res["kruskal"]))
            for t in res["tukey"]:
                rows.append(result_row("F2-posthoc", f"{model}:{t['test_name']}", t))
    f3 = report.get("f3_size_effect", {})
    if f3.get("skipped"):
        rows.append(result_row("F3", "all", f3))
    else:
        rows.append(
            ("F3", "all", repr(f3["coefficients"][1]), _fit_slope_p(f3), "",
             "", "false", f"R^2={f3['r_squared']!r}")
        )
    for model, res in sorted(report.get("f4_temperature", {}).items()):
        if res.get("skipped"):
            rows.append(result_row("F4", model, res))
        else:
            rows.append(result_row("F4", model, res["anova"]))
            rows.append(result_row("F4-pearson", model, res["pearson_r"]))
            for t in res["tukey"]:
                rows.append(result_row("F4-posthoc", f"{model}:{t['test_name']}", t))
    for model, res in sorted(report.get("f5_autocorrelation", {}).items()):
        if res.get("skipped"):
            rows.append(result_row("F5", model, res))
        else:
            rows.append(
                ("F5", model, repr(res["mean_dw"]), "", "", "", "false",
                 f"bands={json.dumps(res['band_shares'], sort_keys=True)}")
            )
    for model, res in sorted(report.get("f6_intrinsic_fraction", {}).items()):
        if isinstance(res, dict) and res.get("skipped"):
            rows.append(result_row("F6", model, res))
        else:
            rows.append(("F6", model, repr(res), "", "", "", "false", "intrinsic fraction"))
    f7 = report.get("f7_multilingual", {})
    if f7.get("skipped"):
        rows.append(result_row("F7", "all", f7))
    else:
        rows.append(result_row("F7", "all", f7["kruskal"]))
        for pair, res in sorted(f7["pairwise_mw"].items()):
            rows.append(result_row("F7-pairwise", pair, res))
    f8 = report.get("f8_drift", {})
    if f8.get("skipped"):
        rows.append(result_row("F8", "all", f8))
    else:
        rows.append(
            ("F8", "all", repr(f8["coefficients"][1]), _fit_slope_p(f8), "",
             "", "false", f8.get("method_notes", ""))
        )
    return [r for r in rows if r is not None]


def _fit_slope_p(fit: dict) -> str:
    pvals = fit.get("p_values")
    return "" if not pvals else repr(pvals[1])


def emit_report(
    battery_json: dict, summaries: list[GenerationSummary], out_dir
) -> list[str]:
    """Write every table; returns the file names written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    _write_csv(out, "falsification_tests.csv", _test_rows(battery_json))
    written.append("falsification_tests.csv")

    neutral = battery_json.get("neutral_gradient", {})
    rows = []
    if not neutral.get("skipped"):
        for model, cats in sorted(neutral.get("category_means", {}).items()):
            ordered = [c for c in NEUTRAL_CATEGORIES if c in cats]
            rows.extend((model, c, repr(cats[c])) for c in ordered)
    _write_csv(out, "neutral_gradient.csv", rows)
    written.append("neutral_gradient.csv")

    rows = []
    for model, profile in sorted(battery_json.get("domain_profiles", {}).items()):
        rows.extend((model, d, repr(v)) for d, v in sorted(profile.items()))
    _write_csv(out, "domain_profiles.csv", rows)
    written.append("domain_profiles.csv")

    conv = battery_json.get("domain_convergence", {})
    rows = []
    if isinstance(conv, dict) and not conv.get("skipped"):
        for pair, res in sorted(conv.items()):
            if res.get("skipped"):
                continue
            rows.append((pair, repr(res["statistic"]), repr(res["p_value"])))
    _write_csv(out, "domain_convergence.csv", rows)
    written.append("domain_convergence.csv")

    rows = []
    for model, frac in sorted(battery_json.get("f6_intrinsic_fraction", {}).items()):
        if not (isinstance(frac, dict) and frac.get("skipped")):
            rows.append((model, repr(frac)))
    _write_csv(out, "intrinsic_fraction.csv", rows)
    written.append("intrinsic_fraction.csv")

    f7 = battery_json.get("f7_multilingual", {})
    rows = []
    if not f7.get("skipped"):
        uniq = defaultdict(list)
        counts = defaultdict(int)
        for s in summaries:
            uniq[s.row.language].append(s.unique_token_count)
            counts[s.row.language] += 1
        for lang in sorted(f7.get("language_means", {})):
            d = f7["cohens_d_vs_baseline"].get(lang)
            rows.append(
                (
                    lang,
                    counts[lang],
                    repr(f7["language_means"][lang]),
                    repr(float(np.mean(uniq[lang]))) if uniq[lang] else "",
                    "" if d is None else repr(d),
                )
            )
    _write_csv(out, "multilingual.csv", rows)
    written.append("multilingual.csv")

    rows = []
    for model, res in sorted(battery_json.get("f4_temperature", {}).items()):
        if res.get("skipped"):
            continue
        level_n = defaultdict(int)
        for s in summaries:
            if s.row.model_name == model:
                level_n[str(s.row.temperature)] += 1
        for level, mean in sorted(res["level_means"].items(), key=lambda kv: float(kv[0])):
            rows.append((model, level, repr(mean), level_n[level]))
    _write_csv(out, "temperature_series.csv", rows)
    written.append("temperature_series.csv")

    cat_groups = defaultdict(list)
    for s in summaries:
        cat_groups[(s.row.model_name, s.row.prompt_category)].append(s.ed_mean)
    rows = []
    for (model, cat), values in sorted(cat_groups.items()):
        klass = "neutral" if cat in NEUTRAL_CATEGORIES else "semantic"
        rows.append((model, cat, klass, repr(float(np.mean(values))), len(values)))
    _write_csv(out, "ed_by_category_series.csv", rows)
    written.append("ed_by_category_series.csv")

    model_points = defaultdict(list)
    params = {}
    for s in summaries:
        model_points[s.row.model_name].append(s.ed_mean)
        params[s.row.model_name] = s.row.param_count
    rows = [
        (m, params[m], repr(float(np.mean(v))))
        for m, v in sorted(model_points.items())
    ]
    _write_csv(out, "size_regression.csv", rows)
    written.append("size_regression.csv")

    return written


def load_battery_json(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"battery report not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
