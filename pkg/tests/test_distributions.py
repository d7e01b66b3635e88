import math

import numpy as np
import pytest

from edprof import distributions as dist
from edprof.errors import ValidationError

# Published studentized-range critical values (standard q tables, 3 d.p.)
PUBLISHED_Q = {
    (3, 10, 0.05): 3.877,
    (2, 10, 0.05): 3.151,
    (3, 12, 0.05): 3.773,
    (4, 20, 0.05): 3.958,
    (3, 10, 0.01): 5.270,
}


def test_normal_cdf_basics():
    assert dist.normal_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert dist.normal_cdf(1.96) == pytest.approx(0.9750021, abs=1e-6)


def test_t_sf_symmetry_and_known_value():
    assert dist.t_sf(0.0, 5) == pytest.approx(0.5, abs=1e-12)
    assert dist.t_sf(2.228, 10) == pytest.approx(0.025, abs=1e-4)  # table t_{.975,10}
    assert dist.t_sf(-2.228, 10) == pytest.approx(0.975, abs=1e-4)
    assert dist.t_two_sided_p(2.228, 10) == pytest.approx(0.05, abs=2e-4)


def test_chi2_sf_known_values():
    assert dist.chi2_sf(3.841, 1) == pytest.approx(0.05, abs=1e-3)
    assert dist.chi2_sf(5.991, 2) == pytest.approx(0.05, abs=1e-3)
    assert dist.chi2_sf(0.0, 4) == 1.0


def test_f_sf_known_value():
    # F_{.95}(2, 10) = 4.103
    assert dist.f_sf(4.103, 2, 10) == pytest.approx(0.05, abs=1e-3)
    assert dist.f_sf(0.0, 3, 7) == 1.0


@pytest.mark.parametrize("key,expected", sorted(PUBLISHED_Q.items()))
def test_studentized_range_quantiles_match_tables(key, expected):
    k, df, alpha = key
    q = dist.studentized_range_quantile(1.0 - alpha, k, df)
    assert q == pytest.approx(expected, abs=0.01)


def test_studentized_range_k2_closed_form():
    # for k = 2 the studentized range is sqrt(2) * |t_df|
    for q in (1.0, 2.5, 3.151, 5.0):
        lhs = dist.studentized_range_cdf(q, 2, 10)
        rhs = 1.0 - 2.0 * dist.t_sf(q / math.sqrt(2.0), 10)
        assert lhs == pytest.approx(rhs, abs=1e-6)


def test_studentized_range_cdf_monotone_and_bounded():
    grid = np.linspace(0.1, 12.0, 40)
    vals = [dist.studentized_range_cdf(q, 4, 15) for q in grid]
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert dist.studentized_range_cdf(0.0, 3, 10) == 0.0


def test_studentized_range_infinite_df():
    # q_{.05}(3, inf) = 3.314 from tables
    q = dist.studentized_range_quantile(0.95, 3, math.inf)
    assert q == pytest.approx(3.314, abs=0.01)


def test_distribution_input_validation():
    with pytest.raises(ValidationError):
        dist.t_sf(1.0, 0)
    with pytest.raises(ValidationError):
        dist.chi2_sf(1.0, -1)
    with pytest.raises(ValidationError):
        dist.studentized_range_cdf(1.0, 1, 10)
    with pytest.raises(ValidationError):
        dist.studentized_range_quantile(1.5, 3, 10)
