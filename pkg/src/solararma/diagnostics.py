"""Statistical tests and information criteria.

Augmented Dickey-Fuller unit-root test (constant, no trend), Ljung-Box
portmanteau test, sample autocorrelation and the Bayesian information
criterion. Chi-squared quantiles are computed numerically from the
regularized incomplete gamma function, so no distribution tables are needed
beyond the Dickey-Fuller critical-value constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

# MacKinnon (2010) response-surface coefficients for the Dickey-Fuller
# distribution, constant-only regression, one unit root. Critical value at
# sample size T is b0 + b1/T + b2/T^2 + b3/T^3.
_DF_CRIT_C = {
    0.01: (-3.43035, -6.5393, -16.786, -79.433),
    0.05: (-2.86154, -2.8903, -4.234, -40.040),
    0.10: (-2.56677, -1.5384, -2.809, 0.0),
}

# One-sided 5% normal quantile, used by the lag backward-elimination rule.
_T_STAT_THRESHOLD = 1.6448536269514722


@dataclass(frozen=True)
class AdfResult:
    """Outcome of the augmented Dickey-Fuller test (null: unit root)."""

    statistic: float
    lags_used: int
    critical_value_5pct: float
    reject_unit_root: bool

    def __post_init__(self):
        if self.reject_unit_root != (self.statistic < self.critical_value_5pct):
            raise ValueError("reject_unit_root inconsistent with statistic and critical value")

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "lags_used": self.lags_used,
            "critical_value_5pct": self.critical_value_5pct,
            "reject_unit_root": self.reject_unit_root,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AdfResult":
        return cls(d["statistic"], d["lags_used"], d["critical_value_5pct"],
                   d["reject_unit_root"])


@dataclass(frozen=True)
class LjungBoxResult:
    """Outcome of the Ljung-Box test at one lag (null: no autocorrelation)."""

    lag: int
    statistic: float
    dof: int
    critical_value_5pct: float
    reject_white: bool

    def __post_init__(self):
        if self.dof < 1:
            raise ValueError("dof must be >= 1")
        if self.reject_white != (self.statistic > self.critical_value_5pct):
            raise ValueError("reject_white inconsistent with statistic and critical value")

    def to_dict(self) -> dict:
        return {
            "lag": self.lag,
            "statistic": self.statistic,
            "dof": self.dof,
            "critical_value_5pct": self.critical_value_5pct,
            "reject_white": self.reject_white,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LjungBoxResult":
        return cls(d["lag"], d["statistic"], d["dof"], d["critical_value_5pct"],
                   d["reject_white"])


def sample_autocorrelation(x, max_lag: int) -> np.ndarray:
    """Sample autocorrelations at lags 1..max_lag.

    rho_k = sum_{t=k+1..n} (x_t - xbar)(x_{t-k} - xbar) / sum_t (x_t - xbar)^2.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    if n <= max_lag:
        raise ValueError(f"need more than {max_lag} observations, got {n}")
    d = x - x.mean()
    denom = float(d @ d)
    if denom <= 0.0:
        raise ValueError("zero-variance input")
    return np.array([float(d[k:] @ d[:-k]) / denom for k in range(1, max_lag + 1)])


def chi2_quantile(prob: float, dof: int, tol: float = 1e-10) -> float:
    """Quantile of the chi-squared distribution with ``dof`` degrees of freedom.

    Inverts the regularized incomplete gamma function P(dof/2, x/2) by
    bisection; the bracket is tightened below ``tol``.
    """
    if not 0 < prob < 1:
        raise ValueError("prob must be in (0, 1)")
    if dof < 1:
        raise ValueError("dof must be >= 1")
    a = dof / 2.0
    cdf = lambda x: special.gammainc(a, x / 2.0)
    lo, hi = 0.0, dof + 10.0 * np.sqrt(2.0 * dof) + 10.0
    while cdf(hi) < prob:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if cdf(mid) < prob:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def ljung_box(residuals, lag: int, fitted_params: int = 0) -> LjungBoxResult:
    """Ljung-Box portmanteau test on ``residuals`` up to ``lag``.

    Q = n (n + 2) sum_{k=1..lag} rho_k^2 / (n - k), compared with the 0.95
    quantile of chi-squared with ``lag - fitted_params`` degrees of freedom.
    ``fitted_params`` is the number of estimated ARMA coefficients (p + q)
    when testing model residuals; pass 0 for a raw series.
    """
    residuals = np.asarray(residuals, dtype=float)
    n = residuals.size
    if lag < 1:
        raise ValueError("lag must be >= 1")
    if n <= lag:
        raise ValueError(f"need more than {lag} residuals, got {n}")
    dof = lag - fitted_params
    if dof < 1:
        raise ValueError(f"lag ({lag}) must exceed fitted_params ({fitted_params})")
    rho = sample_autocorrelation(residuals, lag)
    k = np.arange(1, lag + 1)
    q = float(n * (n + 2) * np.sum(rho**2 / (n - k)))
    crit = chi2_quantile(0.95, dof)
    return LjungBoxResult(lag, q, dof, crit, q > crit)


def _adf_design(x: np.ndarray, k: int):
    """Regression arrays for the ADF equation with ``k`` augmentation lags.

    dx_t = alpha + gamma x_{t-1} + sum_{i=1..k} delta_i dx_{t-i} + e_t.
    Returns (X, y); column order: const, lagged level, dx lags 1..k.
    """
    dx = np.diff(x)
    n = dx.size - k
    y = dx[k:]
    cols = [np.ones(n), x[k:-1]]
    for i in range(1, k + 1):
        cols.append(dx[k - i : dx.size - i])
    return np.column_stack(cols), y


def _ols_tstats(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """t-ratios of all coefficients in an OLS fit of y on X.

    Columns are scaled to unit norm before solving; t-ratios are invariant
    under column scaling, and the conditioning guard then reflects actual
    collinearity rather than the raw units of the data.
    """
    n, k = X.shape
    if n <= k:
        raise ValueError("too few observations for the ADF regression")
    norms = np.sqrt(np.einsum("ij,ij->j", X, X))
    if np.any(norms == 0.0):
        raise ValueError("singular ADF regression matrix (constant series?)")
    Xs = X / norms
    xtx = Xs.T @ Xs
    if np.linalg.cond(xtx) > 1e12:
        raise ValueError("singular ADF regression matrix (constant series?)")
    beta_s = np.linalg.solve(xtx, Xs.T @ y)
    resid = y - Xs @ beta_s
    s2 = float(resid @ resid) / (n - k)
    se_s = np.sqrt(np.diag(s2 * np.linalg.inv(xtx)))
    return beta_s / se_s


def adf_critical_value(n_obs: int, level: float = 0.05) -> float:
    """MacKinnon (2010) critical value for the constant-only ADF regression."""
    if level not in _DF_CRIT_C:
        raise ValueError(f"level must be one of {sorted(_DF_CRIT_C)}")
    b0, b1, b2, b3 = _DF_CRIT_C[level]
    t = float(n_obs)
    return b0 + b1 / t + b2 / t**2 + b3 / t**3


def adf_test(x, max_lag: int | None = None, *, eliminate: bool = True) -> AdfResult:
    """Augmented Dickey-Fuller unit-root test, constant-only specification.

    Parameters
    ----------
    x : array_like
        Series to test; length must be at least 20 + max_lag.
    max_lag : int, optional
        Maximum augmentation lag. Default is the Schwert rule
        floor(12 (n/100)^(1/4)).
    eliminate : bool
        When True (default), insignificant trailing lags (|t| below the
        one-sided 5% normal quantile) are dropped one at a time; when False
        exactly ``max_lag`` lags are used.

    Returns
    -------
    AdfResult
        The unit root is rejected when the statistic falls below (is more
        negative than) the 5% critical value.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if max_lag is None:
        max_lag = int(np.floor(12.0 * (n / 100.0) ** 0.25))
        # Keep enough observations for the regression itself.
        max_lag = min(max_lag, max(0, (n - 10) // 2))
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    if n < 20 + max_lag:
        raise ValueError(f"need at least {20 + max_lag} observations, got {n}")

    k = max_lag
    if eliminate:
        while k > 0:
            X, y = _adf_design(x, k)
            t = _ols_tstats(X, y)
            if abs(t[-1]) >= _T_STAT_THRESHOLD:
                break
            k -= 1
    X, y = _adf_design(x, k)
    t = _ols_tstats(X, y)
    stat = float(t[1])
    crit = adf_critical_value(y.size)
    return AdfResult(stat, k, crit, stat < crit)


def bic(loglik: float, n: int, p: int, q: int) -> float:
    """Bayesian information criterion with p + q + 1 parameters."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(-2.0 * loglik + (p + q + 1) * np.log(n))
