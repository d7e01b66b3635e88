"""Distribution functions backing the hypothesis tests.

Tail probabilities are assembled here from scipy's special functions
(regularized incomplete beta/gamma, normal CDF); the studentized-range
distribution, which has no closed form, is integrated numerically with
composite Gauss-Legendre panels and validated against published critical
value tables.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import ValidationError


def normal_cdf(x: float) -> float:
    return float(special.ndtr(x))


def t_sf(t: float, df: float) -> float:
    """P(T > t) for Student's t with df degrees of freedom."""
    if df <= 0:
        raise ValidationError(f"degrees of freedom must be > 0, got {df}")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    x = df / (df + t * t)
    tail = 0.5 * float(special.betainc(df / 2.0, 0.5, x))
    return tail if t >= 0 else 1.0 - tail


def t_two_sided_p(t: float, df: float) -> float:
    return min(1.0, 2.0 * t_sf(abs(t), df))


def chi2_sf(x: float, df: float) -> float:
    """P(X > x) for chi-square with df degrees of freedom."""
    if df <= 0:
        raise ValidationError(f"degrees of freedom must be > 0, got {df}")
    if x <= 0:
        return 1.0
    return float(special.gammaincc(df / 2.0, x / 2.0))


def f_sf(x: float, df1: float, df2: float) -> float:
    """P(F > x) for the F distribution with (df1, df2) degrees of freedom."""
    if df1 <= 0 or df2 <= 0:
        raise ValidationError("F degrees of freedom must be > 0")
    if x <= 0:
        return 1.0
    return float(special.betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * x)))


# --- studentized range ------------------------------------------------------
#
# CDF of the studentized range Q = range(k std normals) / s, with s^2 an
# independent chi-square_v / v estimate:
#
#   P(Q <= q) = integral_0^inf  P_range(q * s) f_v(s) ds
#   P_range(w) = k * integral  phi(u) [Phi(u) - Phi(u - w)]^(k-1) du
#
# where f_v is the density of s = sqrt(chi2_v / v). Both integrals are
# smooth; composite Gauss-Legendre panels reach table accuracy with modest
# node counts.

_INNER_LO, _INNER_HI, _INNER_PANELS, _INNER_ORDER = -8.5, 8.5, 24, 16
_OUTER_HI, _OUTER_PANELS, _OUTER_ORDER = 8.0, 48, 16


@lru_cache(maxsize=8)
def _panel_nodes(lo: float, hi: float, panels: int, order: int):
    base_x, base_w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    weights = (half[:, None] * base_w[None, :]).ravel()
    return nodes, weights


def _range_cdf_of_widths(widths: np.ndarray, k: int) -> np.ndarray:
    """P(range of k std normals <= w) for an array of widths w >= 0."""
    u, wu = _panel_nodes(_INNER_LO, _INNER_HI, _INNER_PANELS, _INNER_ORDER)
    phi_u = np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
    cdf_u = special.ndtr(u)
    diff = cdf_u[:, None] - special.ndtr(u[:, None] - widths[None, :])
    np.clip(diff, 0.0, 1.0, out=diff)
    integrand = phi_u[:, None] * diff ** (k - 1)
    return np.clip(k * (wu[:, None] * integrand).sum(axis=0), 0.0, 1.0)


def studentized_range_cdf(q: float, k: int, df: float) -> float:
    """P(Q <= q) for the studentized range with k groups and df error dof.

    df = inf gives the plain range distribution of k standard normals.
    """
    if k < 2:
        raise ValidationError(f"studentized range needs k >= 2 groups, got {k}")
    if df <= 0:
        raise ValidationError(f"degrees of freedom must be > 0, got {df}")
    if q <= 0:
        return 0.0
    if math.isinf(df):
        return float(_range_cdf_of_widths(np.array([q]), k)[0])
    s, ws = _panel_nodes(0.0, _OUTER_HI, _OUTER_PANELS, _OUTER_ORDER)
    inner = _range_cdf_of_widths(q * s, k)
    # density of s = sqrt(chi2_df / df), log-space to dodge Gamma overflow
    log_c = (
        math.log(2.0)
        + 0.5 * df * math.log(df / 2.0)
        - math.lgamma(df / 2.0)
    )
    with np.errstate(divide="ignore"):
        log_dens = log_c + (df - 1.0) * np.log(s) - 0.5 * df * s * s
    dens = np.where(s > 0, np.exp(log_dens), 0.0)
    return float(min(1.0, max(0.0, (ws * dens * inner).sum())))


def studentized_range_sf(q: float, k: int, df: float) -> float:
    return 1.0 - studentized_range_cdf(q, k, df)


def studentized_range_quantile(p: float, k: int, df: float) -> float:
    """Quantile q with P(Q <= q) = p, by bisection on the CDF."""
    if not 0.0 < p < 1.0:
        raise ValidationError(f"quantile probability must be in (0, 1), got {p}")
    lo, hi = 1e-9, 10.0
    while studentized_range_cdf(hi, k, df) < p:
        hi *= 2.0
        if hi > 1e6:
            raise ValidationError("studentized range quantile did not bracket")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if studentized_range_cdf(mid, k, df) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
