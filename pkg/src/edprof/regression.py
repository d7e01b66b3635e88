"""Ordinary least squares via QR, plus residualization.

Only what the battery needs: coefficient estimates with standard errors
and t-based p-values, R-squared, residuals. Rank deficiency raises a
typed error rather than producing a pseudo-inverse fit.
"""

from __future__ import annotations

import math

import numpy as np
from dataclasses import dataclass

from . import distributions as dist
from .errors import RankDeficiencyError, ValidationError


@dataclass(frozen=True)
class RegressionFit:
    """Least-squares fit. Column 0 is the intercept when one was requested.

    standard_errors and p_values are None when the fit has zero residual
    degrees of freedom (exact interpolation); method_notes says so.
    """

    coefficients: np.ndarray
    standard_errors: np.ndarray | None
    p_values: np.ndarray | None
    r_squared: float
    residuals: np.ndarray
    df_resid: int
    include_intercept: bool
    method_notes: str = ""

    def to_jsonable(self) -> dict:
        return {
            "coefficients": [float(c) for c in self.coefficients],
            "standard_errors": None
            if self.standard_errors is None
            else [float(s) for s in self.standard_errors],
            "p_values": None
            if self.p_values is None
            else [float(p) for p in self.p_values],
            "r_squared": self.r_squared,
            "df_resid": self.df_resid,
            "include_intercept": self.include_intercept,
            "method_notes": self.method_notes,
        }


def _design_matrix(predictors, n: int, include_intercept: bool) -> np.ndarray:
    cols = np.asarray(predictors, dtype=np.float64)
    if cols.ndim == 1:
        cols = cols[:, None]
    if cols.ndim != 2 or cols.shape[0] != n:
        raise ValidationError(
            f"predictors must be (n, m) with n={n}, got shape {cols.shape}"
        )
    if not np.isfinite(cols).all():
        raise ValidationError("predictors contain non-finite values")
    if include_intercept:
        cols = np.hstack([np.ones((n, 1)), cols])
    return cols


def ols(y, predictors, include_intercept: bool = True) -> RegressionFit:
    """Least squares of y on the predictor columns, via QR decomposition."""
    yv = np.asarray(y, dtype=np.float64)
    if yv.ndim != 1 or yv.size < 2:
        raise ValidationError("response must be 1-D with at least 2 observations")
    if not np.isfinite(yv).all():
        raise ValidationError("response contains non-finite values")
    x = _design_matrix(predictors, yv.size, include_intercept)
    n, m = x.shape
    if n < m:
        raise ValidationError(f"need at least as many rows ({n}) as columns ({m})")
    q, r = np.linalg.qr(x)
    diag = np.abs(np.diag(r))
    if diag.min() <= max(n, m) * np.finfo(np.float64).eps * max(diag.max(), 1.0):
        raise RankDeficiencyError("design matrix is rank deficient")
    beta = np.linalg.solve(r, q.T @ yv)
    residuals = yv - x @ beta
    rss = float(residuals @ residuals)
    df_resid = n - m
    notes = ""
    if df_resid > 0:
        sigma2 = rss / df_resid
        rinv = np.linalg.solve(r, np.eye(m))
        cov = sigma2 * (rinv @ rinv.T)
        se = np.sqrt(np.diag(cov))
        tvals = np.empty(m)
        for i in range(m):
            if se[i] > 0:
                tvals[i] = beta[i] / se[i]
            else:
                tvals[i] = 0.0 if beta[i] == 0 else math.inf
        pvals = np.array([dist.t_two_sided_p(t, df_resid) for t in tvals])
    else:
        se = None
        pvals = None
        notes = "zero residual degrees of freedom: exact fit, no inference"
    if include_intercept:
        tss = float(((yv - yv.mean()) ** 2).sum())
    else:
        tss = float((yv**2).sum())
    if tss <= 0.0:
        r2 = 1.0 if rss <= 1e-12 else 0.0
    else:
        r2 = max(0.0, min(1.0, 1.0 - rss / tss))
    return RegressionFit(
        coefficients=beta,
        standard_errors=se,
        p_values=pvals,
        r_squared=r2,
        residuals=residuals,
        df_resid=df_resid,
        include_intercept=include_intercept,
        method_notes=notes,
    )


def residualize(y, x) -> np.ndarray:
    """Residuals of y after an intercept-plus-slope regression on x.

    The result is orthogonal to x (and centered) to ~1e-8 relative.
    """
    fit = ols(y, x, include_intercept=True)
    return fit.residuals


def residual_orthogonality(residuals, x) -> float:
    """Relative inner product between residuals and the covariate; small
    values confirm the regression removed the covariate direction."""
    e = np.asarray(residuals, dtype=np.float64)
    xv = np.asarray(x, dtype=np.float64)
    scale = float(np.abs(e).sum() * np.abs(xv).sum())
    if scale == 0.0:
        return 0.0
    return abs(float(e @ xv)) / scale


def log_params_regression(mean_eds, param_counts) -> RegressionFit:
    """Regression of per-model mean ED on the natural log of parameter count."""
    params = np.asarray(param_counts, dtype=np.float64)
    if (params <= 0).any():
        raise ValidationError("parameter counts must be positive")
    return ols(mean_eds, np.log(params), include_intercept=True)
