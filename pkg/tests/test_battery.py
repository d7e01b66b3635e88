"""Battery orchestration tests, all on planted synthetic summaries where the
ground truth is known by construction."""

import numpy as np
import pytest

from edprof import battery
from edprof.battery import SkipNote
from edprof.errors import ValidationError
from edprof.manifest import NEUTRAL_CATEGORIES, SEMANTIC_CATEGORIES

# Neutral-category level fixtures: transformer-style column and the
# reversed-extremes column with empty strings highest.
TF_NEUTRAL_MEANS = {
    "random_ascii": 0.268,
    "nonsense_syllables": 0.286,
    "explicit_randomness": 0.308,
    "neutral_stub": 0.312,
    "empty": 0.314,
}
SSM_NEUTRAL_MEANS = {
    "random_ascii": 0.540,
    "nonsense_syllables": 0.535,
    "explicit_randomness": 0.665,
    "neutral_stub": 0.659,
    "empty": 0.704,
}
# Four-domain profile columns for two converging models plus their hand
# rank computation: sum d^2 = 6 -> rho = 0.4.
DOMAIN_PROFILE_A = {"code": 0.356, "news": 0.342, "fiction": 0.339, "wikipedia": 0.337}
DOMAIN_PROFILE_B = {"code": 0.360, "news": 0.327, "fiction": 0.336, "wikipedia": 0.329}


def test_f1_partition_counts_sum(make_summary):
    rng = np.random.default_rng(0)
    sums = [
        make_summary(rng.uniform(0.2, 0.4), model=m, category=c, generation_index=i)
        for i, (m, c) in enumerate(
            (m, c) for m in ("a", "b") for c in ("code", "empty") for _ in range(12)
        )
    ]
    results, counts = battery.f1_nonzero(sums, partition="model_category")
    assert sum(counts.values()) == len(sums)
    assert set(results) == {"a/code", "a/empty", "b/code", "b/empty"}
    assert all(r.p_value < 1e-6 for r in results.values())


def test_f1_all_zero_degenerate_path(make_summary):
    sums = [make_summary(0.0, generation_index=i) for i in range(5)]
    results, _ = battery.f1_nonzero(sums, partition="global")
    r = results["all"]
    assert r.statistic == 0.0
    assert r.p_value == 1.0


def test_f1_single_summary_skipped(make_summary):
    results, counts = battery.f1_nonzero([make_summary(0.3)], partition="global")
    assert isinstance(results["all"], SkipNote)
    assert counts["all"] == 1


def test_f1_planted_strong_effect(make_summary):
    rng = np.random.default_rng(1)
    sums = [
        make_summary(rng.normal(0.3, 0.05), generation_index=i) for i in range(100)
    ]
    results, _ = battery.f1_nonzero(sums, partition="global")
    assert results["all"].p_value < 1e-6


def test_f2_planted_domain_shift(make_summary):
    rng = np.random.default_rng(2)
    sums = []
    idx = 0
    for cat in SEMANTIC_CATEGORIES:
        shift = 0.02 if cat == "code" else 0.0
        for _ in range(50):
            sums.append(
                make_summary(
                    rng.normal(0.33 + shift, 0.005), category=cat, generation_index=idx
                )
            )
            idx += 1
    out = battery.f2_domains(sums)
    res = out["model-a"]
    assert res.kruskal.p_value < 1e-6
    assert max(res.domain_means, key=res.domain_means.get) == "code"
    sig_pairs = [t for t in res.tukey if t.significant]
    assert all("code" in t.test_name for t in sig_pairs)
    assert len(sig_pairs) == 3


def test_f2_identical_domains_usually_flat(make_summary):
    rng = np.random.default_rng(3)
    sums = [
        make_summary(rng.normal(0.33, 0.01), category=cat, generation_index=i * 10 + j)
        for i, cat in enumerate(SEMANTIC_CATEGORIES)
        for j in range(8)
    ]
    out = battery.f2_domains(sums)
    assert out["model-a"].kruskal.p_value > 0.05


def test_f2_single_domain_skipped(make_summary):
    sums = [make_summary(0.3, category="code", generation_index=i) for i in range(4)]
    assert isinstance(battery.f2_domains(sums)["model-a"], SkipNote)


def test_f3_recovers_planted_slope(make_summary):
    rng = np.random.default_rng(4)
    sums = []
    idx = 0
    for params in (1e9, 3e9, 9e9, 27e9, 81e9, 243e9):
        true = 0.1 + 0.01 * np.log(params)
        for _ in range(20):
            sums.append(
                make_summary(
                    rng.normal(true, 0.01),
                    model=f"m{params:.0e}",
                    param_count=int(params),
                    generation_index=idx,
                )
            )
            idx += 1
    fit = battery.f3_size_effect(sums)
    slope, se = fit.coefficients[1], fit.standard_errors[1]
    assert abs(slope - 0.01) <= 2 * se


def test_f3_two_models_reported_with_warning(make_summary):
    sums = [
        make_summary(0.25, model="small", param_count=10**9, generation_index=0),
        make_summary(0.32, model="big", param_count=10**11, generation_index=1),
    ]
    fit = battery.f3_size_effect(sums)
    assert fit.df_resid == 0
    assert "no residual df" in fit.method_notes


def test_f3_flat_sizes_nonsignificant(make_summary):
    rng = np.random.default_rng(5)
    sums = []
    idx = 0
    for params in (1e9, 1e10, 1e11):
        for _ in range(30):
            sums.append(
                make_summary(
                    rng.normal(0.3, 0.02),
                    model=f"m{params:.0e}",
                    param_count=int(params),
                    generation_index=idx,
                )
            )
            idx += 1
    fit = battery.f3_size_effect(sums)
    assert fit.p_values[1] > 0.05


def test_f4_single_level_skipped(make_summary):
    sums = [make_summary(0.3, temperature=1.0, generation_index=i) for i in range(6)]
    assert isinstance(battery.f4_temperature(sums)["model-a"], SkipNote)


def test_f4_declining_regime(make_summary):
    rng = np.random.default_rng(6)
    levels = {0.7: 0.796, 1.0: 0.618, 1.3: 0.440}
    sums = []
    idx = 0
    for t, mean in levels.items():
        for _ in range(25):
            sums.append(
                make_summary(rng.normal(mean, 0.01), temperature=t, generation_index=idx)
            )
            idx += 1
    res = battery.f4_temperature(sums)["model-a"]
    assert res.pearson_r.statistic < -0.95
    assert all(t.significant for t in res.tukey)
    level_means = [res.level_means[k] for k in ("0.7", "1.0", "1.3")]
    np.testing.assert_allclose(level_means, [0.796, 0.618, 0.440], atol=0.01)


def test_f5_white_noise_and_ar1():
    rng = np.random.default_rng(7)
    white = [rng.normal(0.3, 0.05, 500) for _ in range(10)]
    phi = 0.5
    ar1 = []
    for _ in range(10):
        e = np.empty(500)
        e[0] = rng.normal()
        for i in range(1, 500):
            e[i] = phi * e[i - 1] + rng.normal()
        ar1.append(0.3 + 0.05 * e)
    out = battery.f5_autocorrelation({"white": white, "ar1": ar1})
    assert out["white"].mean_dw == pytest.approx(2.0, abs=0.1)
    assert out["ar1"].mean_dw == pytest.approx(1.0, abs=0.1)
    assert out["ar1"].band_shares["positive"] == 1.0


def test_f5_short_series_skipped():
    out = battery.f5_autocorrelation({"m": [np.array([0.5])]})
    assert isinstance(out["m"], SkipNote)


def intrinsic_fixture(make_summary, neutral_level, semantic_level):
    sums = []
    idx = 0
    for cat in NEUTRAL_CATEGORIES:
        for _ in range(3):
            sums.append(
                make_summary(neutral_level, category=cat, generation_index=idx)
            )
            idx += 1
    for cat in SEMANTIC_CATEGORIES:
        for _ in range(3):
            sums.append(
                make_summary(semantic_level, category=cat, generation_index=idx)
            )
            idx += 1
    return sums


def test_f6_intrinsic_fraction_fixtures(make_summary):
    out = battery.f6_intrinsic_fraction(intrinsic_fixture(make_summary, 0.300, 0.341))
    assert out["model-a"] == pytest.approx(0.880, abs=0.001)
    out = battery.f6_intrinsic_fraction(intrinsic_fixture(make_summary, 0.620, 0.670))
    assert out["model-a"] == pytest.approx(0.925, abs=0.001)
    out = battery.f6_intrinsic_fraction(intrinsic_fixture(make_summary, 0.5, 0.5))
    assert out["model-a"] == pytest.approx(1.0, abs=1e-12)


def test_f6_missing_class_skipped(make_summary):
    sums = [make_summary(0.3, category="code", generation_index=i) for i in range(3)]
    assert isinstance(battery.f6_intrinsic_fraction(sums)["model-a"], SkipNote)


def test_f7_ordering_recovered(make_summary):
    # five-language fixture at spread 0.02: ordering and KW significance
    means = {"EN": 0.329, "JA": 0.388, "ZH": 0.395, "PL": 0.401, "AR": 0.408}
    rng = np.random.default_rng(0)
    sums = []
    idx = 0
    for lang, mean in means.items():
        for _ in range(160):
            sums.append(
                make_summary(
                    rng.normal(mean, 0.02), language=lang, generation_index=idx
                )
            )
            idx += 1
    res = battery.f7_multilingual(sums)
    assert res.kruskal.p_value < 1e-40
    assert res.ordering == ["EN", "JA", "ZH", "PL", "AR"]
    assert res.baseline == "EN"
    assert set(res.cohens_d_vs_baseline) == {"JA", "ZH", "PL", "AR"}


def test_f7_ordering_invariant_under_affine_rescaling(make_summary):
    rng = np.random.default_rng(14)
    means = {"EN": 0.30, "JA": 0.36, "PL": 0.42}
    def build(scale, shift):
        sums = []
        idx = 0
        for lang, mean in means.items():
            for _ in range(20):
                sums.append(
                    make_summary(
                        scale * rng.normal(mean, 0.01) + shift,
                        language=lang,
                        generation_index=idx,
                        seed=idx,
                    )
                )
                idx += 1
        return sums
    rng = np.random.default_rng(14)
    base = battery.f7_multilingual(build(1.0, 0.0))
    rng = np.random.default_rng(14)
    rescaled = battery.f7_multilingual(build(0.5, 0.2))
    assert base.ordering == rescaled.ordering
    for pair, res in base.pairwise_mw.items():
        assert rescaled.pairwise_mw[pair].p_value == pytest.approx(
            res.p_value, abs=1e-12
        )


def test_f7_identical_languages_flat(make_summary):
    rng = np.random.default_rng(8)
    sums = [
        make_summary(rng.normal(0.35, 0.02), language=lang, generation_index=i * 40 + j)
        for i, lang in enumerate(("EN", "PL"))
        for j in range(40)
    ]
    res = battery.f7_multilingual(sums)
    assert res.kruskal.p_value > 0.05


def test_f7_single_language_skipped(make_summary):
    sums = [make_summary(0.3, generation_index=i) for i in range(5)]
    assert isinstance(battery.f7_multilingual(sums), SkipNote)


def test_f8_planted_drift_recovered(make_summary):
    rng = np.random.default_rng(9)
    n = 5000
    temps = [0.7, 1.0, 1.3]
    sums = [
        make_summary(
            0.3 + 1.5e-5 * i + rng.normal(0, 0.01),
            temperature=temps[i % 3],
            generation_index=i,
        )
        for i in range(n)
    ]
    fit = battery.f8_drift(sums)
    slope, se = fit.coefficients[1], fit.standard_errors[1]
    assert abs(slope - 1.5e-5) <= 2 * se
    assert fit.p_values[1] < 1e-14


def test_f8_no_drift_flat(make_summary):
    rng = np.random.default_rng(22)
    sums = [
        make_summary(rng.normal(0.3, 0.01), generation_index=i) for i in range(500)
    ]
    fit = battery.f8_drift(sums)
    assert fit.p_values[1] > 0.05


def test_f8_constant_index_skipped(make_summary):
    sums = [
        make_summary(0.3 + 0.001 * i, generation_index=0, seed=i, prompt_text_ref=f"p{i}")
        for i in range(10)
    ]
    # constant generation_index rows (distinct seeds keep the manifest valid)
    out = battery.f8_drift(sums)
    assert isinstance(out, SkipNote)


def test_domain_profile_convergence_hand_values():
    identical = battery.domain_profile_convergence(
        {"a": DOMAIN_PROFILE_A, "b": DOMAIN_PROFILE_A}
    )
    assert identical["a|b"].statistic == pytest.approx(1.0)
    table = battery.domain_profile_convergence(
        {"a": DOMAIN_PROFILE_A, "b": DOMAIN_PROFILE_B}
    )
    # hand rank computation on the two four-domain columns: rho = 0.4
    assert table["a|b"].statistic == pytest.approx(0.4, abs=1e-12)
    reversed_profile = {k: -v for k, v in DOMAIN_PROFILE_A.items()}
    rev = battery.domain_profile_convergence(
        {"a": DOMAIN_PROFILE_A, "b": reversed_profile}
    )
    assert rev["a|b"].statistic == pytest.approx(-1.0)


def test_neutral_gradient_orderings(make_summary):
    rng = np.random.default_rng(11)
    sums = []
    idx = 0
    for model, column in (("tf", TF_NEUTRAL_MEANS), ("ssm", SSM_NEUTRAL_MEANS)):
        for cat, mean in column.items():
            for k in range(30):
                sums.append(
                    make_summary(
                        rng.normal(mean, 0.004),
                        model=model,
                        category=cat,
                        temperature=(0.7, 1.0, 1.3)[k % 3],
                        seed=k // 3,
                        generation_index=idx,
                    )
                )
                idx += 1
    grad = battery.neutral_gradient(sums)
    tf = grad.category_means["tf"]
    order = sorted(tf, key=tf.get)
    assert order == [
        "random_ascii", "nonsense_syllables", "explicit_randomness",
        "neutral_stub", "empty",
    ]
    ssm = grad.category_means["ssm"]
    assert max(ssm, key=ssm.get) == "empty"
    assert min(ssm, key=ssm.get) == "nonsense_syllables"
    r = grad.random_vs_empty["tf"]
    assert r.p_value < 0.001 and r.statistic < 0  # random below empty


def test_neutral_gradient_flat_case(make_summary):
    rng = np.random.default_rng(12)
    sums = []
    idx = 0
    for cat in NEUTRAL_CATEGORIES:
        for k in range(12):
            sums.append(
                make_summary(
                    rng.normal(0.3, 0.01),
                    category=cat,
                    temperature=(0.7, 1.0, 1.3)[k % 3],
                    seed=k // 3,
                    generation_index=idx,
                )
            )
            idx += 1
    grad = battery.neutral_gradient(sums)
    assert grad.random_vs_empty["model-a"].p_value > 0.05


def test_run_battery_empty_input():
    report = battery.run_battery([])
    assert report.input_count == 0
    assert isinstance(report.f3, SkipNote)
    assert isinstance(report.f7, SkipNote)


def test_run_battery_deterministic(make_summary):
    rng = np.random.default_rng(13)
    sums = [
        make_summary(
            rng.uniform(0.2, 0.5),
            category=("code", "empty", "wikipedia")[i % 3],
            temperature=(0.7, 1.0, 1.3)[i % 3],
            generation_index=i,
        )
        for i in range(30)
    ]
    a = battery.run_battery(sums).to_jsonable()
    b = battery.run_battery(sums).to_jsonable()
    assert a == b
    assert a["input_count"] == 30
    assert sum(a["f1_partition_counts"].values()) == 30


def test_run_battery_rejects_unknown_partition(make_summary):
    with pytest.raises(ValidationError):
        battery.run_battery([make_summary(0.3)], partition="by_moon_phase")
