"""ARMA(p, q) models with Gaussian innovations.

The model for a series x_t with mean mu is

    (x_t - mu) = sum_i phi_i (x_{t-i} - mu) + eps_t + sum_j theta_j eps_{t-j}

with eps_t ~ N(0, sigma2) white noise. The exact likelihood is evaluated
through the Harvey state-space form with the filter initialised at the
stationary state distribution, so it equals the log-density of the implied
multivariate normal. Fitting maximises that likelihood over the stationary
and invertible region via the partial-autocorrelation reparameterization
(Monahan 1984), which maps the open cube (-1, 1)^(p+q) bijectively onto the
valid coefficient region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize, signal

from . import seeding
from .errors import FitError

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is a hard dependency, but keep a fallback
    def _njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco


_LOG_2PI = math.log(2.0 * math.pi)

# Filter-freeze tolerance: once the prediction variance and state covariance
# stop changing by more than this, the recursion has reached steady state and
# the remaining innovations follow the plain ARMA filter.
_FREEZE_TOL = 1e-13

_OBJECTIVE_BIG = 1e12

# The optimizer searches partials r = _PACF_SHRINK * tanh(z). Without the
# shrink an overparameterized fit can saturate tanh to 1 - 1e-16 and place a
# root numerically on the unit circle, which the model invariant rejects.
_PACF_SHRINK = 1.0 - 1e-4


# ---------------------------------------------------------------------------
# partial-autocorrelation reparameterization

def pacf_to_ar(r) -> np.ndarray:
    """AR coefficients of the stationary model with partial autocorrelations ``r``."""
    r = np.asarray(r, dtype=float)
    a = r.copy()
    for k in range(1, r.size):
        a[:k] = a[:k] - r[k] * a[:k][::-1]
    return a


def ar_to_pacf(phi) -> np.ndarray:
    """Inverse of :func:`pacf_to_ar`; raises ValueError outside the stationary region."""
    a = np.asarray(phi, dtype=float).copy()
    p = a.size
    r = np.empty(p)
    for k in range(p - 1, 0, -1):
        r[k] = a[k]
        d = 1.0 - a[k] ** 2
        if d <= 0.0:
            raise ValueError("coefficients outside the stationary region")
        a = (a[:k] + a[k] * a[:k][::-1]) / d
    if p:
        r[0] = a[0]
    if np.any(np.abs(r) >= 1.0):
        raise ValueError("coefficients outside the stationary region")
    return r


def pacf_to_ma(u) -> np.ndarray:
    """MA coefficients of the invertible model parameterised by ``u`` in (-1, 1)^q."""
    u = np.asarray(u, dtype=float)
    a = u.copy()
    for k in range(1, u.size):
        a[:k] = a[:k] + u[k] * a[:k][::-1]
    return a


def ma_to_pacf(theta) -> np.ndarray:
    """Inverse of :func:`pacf_to_ma`; raises ValueError outside the invertible region."""
    a = np.asarray(theta, dtype=float).copy()
    q = a.size
    u = np.empty(q)
    for k in range(q - 1, 0, -1):
        u[k] = a[k]
        d = 1.0 - a[k] ** 2
        if d <= 0.0:
            raise ValueError("coefficients outside the invertible region")
        a = (a[:k] - a[k] * a[:k][::-1]) / d
    if q:
        u[0] = a[0]
    if np.any(np.abs(u) >= 1.0):
        raise ValueError("coefficients outside the invertible region")
    return u


def _min_root_modulus(coefs: np.ndarray, sign: float) -> float:
    """Smallest |root| of 1 + sign*(c_1 z + ... + c_k z^k); inf for k = 0."""
    coefs = np.asarray(coefs, dtype=float)
    if coefs.size == 0 or not np.any(coefs):
        return math.inf
    poly = np.concatenate(([1.0], sign * coefs))  # ascending powers
    roots = np.roots(poly[::-1])
    if roots.size == 0:
        return math.inf
    return float(np.min(np.abs(roots)))


# ---------------------------------------------------------------------------
# model container

@dataclass(frozen=True)
class ArmaModel:
    """Fitted or hand-specified ARMA(p, q) model.

    Invariants: the AR polynomial 1 - phi_1 z - ... - phi_p z^p and the MA
    polynomial 1 + theta_1 z + ... + theta_q z^q both have all roots strictly
    outside the unit circle, and sigma2 >= 0. (Estimation always yields
    sigma2 > 0; sigma2 = 0 is allowed so degenerate noise-free simulation is
    expressible.)
    """

    p: int
    q: int
    phi: np.ndarray
    theta: np.ndarray
    intercept: float
    sigma2: float
    loglik: Optional[float] = None
    n_obs: Optional[int] = None

    def __post_init__(self):
        phi = np.atleast_1d(np.asarray(self.phi, dtype=float))
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        if self.p < 0 or self.q < 0:
            raise ValueError("orders must be non-negative")
        if phi.size != self.p:
            raise ValueError(f"phi must have length p={self.p}, got {phi.size}")
        if theta.size != self.q:
            raise ValueError(f"theta must have length q={self.q}, got {theta.size}")
        if not np.all(np.isfinite(phi)) or not np.all(np.isfinite(theta)):
            raise ValueError("coefficients must be finite")
        if _min_root_modulus(phi, -1.0) <= 1.0:
            raise ValueError("AR polynomial has a root on or inside the unit circle")
        if _min_root_modulus(theta, 1.0) <= 1.0:
            raise ValueError("MA polynomial has a root on or inside the unit circle")
        if not (np.isfinite(self.sigma2) and self.sigma2 >= 0.0):
            raise ValueError("sigma2 must be finite and >= 0")
        phi.setflags(write=False)
        theta.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "sigma2", float(self.sigma2))

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "phi": [float(v) for v in self.phi],
            "theta": [float(v) for v in self.theta],
            "intercept": self.intercept,
            "sigma2": self.sigma2,
            "loglik": self.loglik,
            "n_obs": self.n_obs,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArmaModel":
        return cls(
            p=int(d["p"]),
            q=int(d["q"]),
            phi=np.asarray(d["phi"], dtype=float),
            theta=np.asarray(d["theta"], dtype=float),
            intercept=float(d["intercept"]),
            sigma2=float(d["sigma2"]),
            loglik=None if d.get("loglik") is None else float(d["loglik"]),
            n_obs=None if d.get("n_obs") is None else int(d["n_obs"]),
        )


# ---------------------------------------------------------------------------
# state space machinery

def _state_matrices(phi: np.ndarray, theta: np.ndarray):
    """Harvey transition matrix T and disturbance loading R (sigma2 = 1)."""
    p, q = phi.size, theta.size
    r = max(p, q + 1)
    T = np.zeros((r, r))
    T[:p, 0] = phi
    for i in range(r - 1):
        T[i, i + 1] = 1.0
    R = np.zeros(r)
    R[0] = 1.0
    R[1 : q + 1] = theta
    return T, np.outer(R, R)


def _stationary_state_cov(T: np.ndarray, RR: np.ndarray) -> np.ndarray:
    """Solve P = T P T' + RR via the Kronecker-vectorised linear system."""
    r = T.shape[0]
    A = np.eye(r * r) - np.kron(T, T)
    P = np.linalg.solve(A, RR.reshape(-1)).reshape(r, r)
    return 0.5 * (P + P.T)


@_njit(cache=True)
def _kalman_prefix(xc, phi, theta, ftol, min_steps):  # pragma: no cover - compiled
    """Exact Kalman recursion until the filter reaches steady state.

    The transition matrix is the Harvey companion form (phi down the first
    column, ones on the superdiagonal), so all products are written out
    against that structure instead of as general matmuls. The initial state
    covariance solves the stationary equation P = T P T' + R R' through its
    Kronecker-vectorised linear system, built sparsely from the companion
    entries.

    Returns (v, F, m, f_inf, ok): innovations and their relative variances
    for the first m steps, the steady-state variance to use from step m on
    (f_inf, valid when m < n), and ok = False if a non-positive prediction
    variance was encountered.
    """
    n = xc.shape[0]
    p = phi.shape[0]
    q = theta.shape[0]
    r = max(p, q + 1)

    Rv = np.zeros(r)
    Rv[0] = 1.0
    for j in range(q):
        Rv[j + 1] = theta[j]
    RR = np.outer(Rv, Rv)

    # Nonzero entries of T: (i, 0) -> phi[i] and (i, i+1) -> 1.
    nnz = p + r - 1
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz)
    for i in range(p):
        rows[i], cols[i], vals[i] = i, 0, phi[i]
    for i in range(r - 1):
        rows[p + i], cols[p + i], vals[p + i] = i, i + 1, 1.0
    M = np.eye(r * r)
    for s in range(nnz):
        for u in range(nnz):
            M[rows[s] * r + rows[u], cols[s] * r + cols[u]] -= vals[s] * vals[u]
    P = np.linalg.solve(M, RR.copy().reshape(r * r)).reshape(r, r)

    v = np.empty(n)
    F = np.empty(n)
    a = np.zeros(r)
    an = np.empty(r)
    TP = np.empty((r, r))
    Pn = np.empty((r, r))
    K = np.empty(r)
    m = n
    f_inf = 0.0
    for t in range(n):
        Ft = P[0, 0]
        if not Ft > 0.0:
            return v, F, m, f_inf, False
        vt = xc[t] - a[0]
        v[t] = vt
        F[t] = Ft
        # TP = T @ P, row i: phi[i] * P[0, :] (i < p) plus P[i + 1, :] (i < r - 1)
        for i in range(r):
            g = phi[i] if i < p else 0.0
            if i < r - 1:
                for j in range(r):
                    TP[i, j] = g * P[0, j] + P[i + 1, j]
            else:
                for j in range(r):
                    TP[i, j] = g * P[0, j]
        for i in range(r):
            K[i] = TP[i, 0] / Ft
        # a <- T a + K v
        for i in range(r):
            g = phi[i] if i < p else 0.0
            an[i] = g * a[0] + (a[i + 1] if i < r - 1 else 0.0) + K[i] * vt
        for i in range(r):
            a[i] = an[i]
        # Pn = TP @ T' + RR - Ft K K', column j of TP @ T' mirrors the row rule
        for i in range(r):
            for j in range(r):
                g = phi[j] if j < p else 0.0
                acc = g * TP[i, 0] + RR[i, j] - Ft * K[i] * K[j]
                if j < r - 1:
                    acc += TP[i, j + 1]
                Pn[i, j] = acc
        for i in range(r):
            for j in range(i + 1, r):
                s = 0.5 * (Pn[i, j] + Pn[j, i])
                Pn[i, j] = s
                Pn[j, i] = s
        if t + 1 >= min_steps:
            dmax = 0.0
            pmax = 0.0
            for i in range(r):
                for j in range(r):
                    d = abs(Pn[i, j] - P[i, j])
                    if d > dmax:
                        dmax = d
                    ap = abs(Pn[i, j])
                    if ap > pmax:
                        pmax = ap
            if abs(Ft - Pn[0, 0]) <= ftol * (1.0 + Ft) and dmax <= ftol * (1.0 + pmax):
                m = t + 1
                f_inf = Pn[0, 0]
                break
        for i in range(r):
            for j in range(r):
                P[i, j] = Pn[i, j]
    return v, F, m, f_inf, True


def _loglik_terms(xc: np.ndarray, phi: np.ndarray, theta: np.ndarray):
    """(sum log F_t, sum v_t^2 / F_t) for the sigma2-normalised filter.

    F_t here is the one-step prediction variance relative to sigma2. Exact
    Kalman steps are used until the covariance recursion converges; the
    remaining innovations then follow the steady-state ARMA filter, applied
    vectorised.
    """
    n = xc.size
    p, q = phi.size, theta.size
    min_steps = max(p, q) + 2
    v, F, m, f_inf, ok = _kalman_prefix(
        np.ascontiguousarray(xc), np.ascontiguousarray(phi),
        np.ascontiguousarray(theta), _FREEZE_TOL, min_steps
    )
    if not ok:
        return math.nan, math.nan
    logdet = float(np.sum(np.log(F[:m])))
    quad = float(np.sum(v[:m] ** 2 / F[:m]))
    if m < n:
        b = np.concatenate(([1.0], -phi))
        a = np.concatenate(([1.0], theta))
        y_hist = v[m - q : m][::-1] if q else None
        x_hist = xc[m - p : m][::-1] if p else None
        if q or p:
            zi = signal.lfiltic(b, a, y_hist if q else [], x_hist if p else [])
            v_rest, _ = signal.lfilter(b, a, xc[m:], zi=zi)
        else:
            v_rest = xc[m:]
        logdet += (n - m) * math.log(f_inf)
        quad += float(np.sum(v_rest**2)) / f_inf
    return logdet, quad


def log_likelihood(model: ArmaModel, series) -> float:
    """Exact Gaussian log-likelihood of ``series`` under ``model``.

    The series is mean-adjusted by the model intercept; the result equals the
    log-density of the stationary multivariate normal the model implies.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < max(model.p, model.q) + 1:
        raise ValueError(f"series too short: need at least {max(model.p, model.q) + 1}")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    if model.sigma2 <= 0.0:
        raise ValueError("log-likelihood requires sigma2 > 0")
    logdet, quad = _loglik_terms(x - model.intercept, model.phi, model.theta)
    if not (math.isfinite(logdet) and math.isfinite(quad)):
        raise ValueError("filter failed; model parameters invalid")
    return -0.5 * (n * _LOG_2PI + n * math.log(model.sigma2) + logdet + quad / model.sigma2)


def conditional_residuals(model: ArmaModel, series) -> np.ndarray:
    """One-step innovation estimates, zero-initialised before the sample.

    eps_t = (x_t - mu) - sum_i phi_i (x_{t-i} - mu) - sum_j theta_j eps_{t-j},
    with pre-sample deviations and innovations taken as zero. Feeding these
    back through :func:`forecast_one_step` reproduces the series exactly.
    """
    x = np.asarray(series, dtype=float)
    b = np.concatenate(([1.0], -model.phi))
    a = np.concatenate(([1.0], model.theta))
    return signal.lfilter(b, a, x - model.intercept)


# ---------------------------------------------------------------------------
# fitting

def _hannan_rissanen_start(x: np.ndarray, p: int, q: int):
    """Rough (phi, theta, mu) estimate via a long-AR regression warm start."""
    n = x.size
    mu = float(x.mean())
    xc = x - mu
    if q == 0:
        # Plain conditional least squares for the AR case.
        if p == 0:
            return np.empty(0), np.empty(0), mu
        X = np.column_stack([xc[p - 1 - i : n - 1 - i] for i in range(p)])
        beta, *_ = np.linalg.lstsq(X, xc[p:], rcond=None)
        return beta, np.empty(0), mu
    L = min(max(2 * (p + q), 8), max(n // 4, p + q + 1))
    if n - L <= L + p + q + 2:
        return np.zeros(p), np.zeros(q), mu
    XL = np.column_stack([xc[L - 1 - i : n - 1 - i] for i in range(L)])
    beta, *_ = np.linalg.lstsq(XL, xc[L:], rcond=None)
    eps = np.concatenate([np.zeros(L), xc[L:] - XL @ beta])
    m0 = max(p, q)
    rows = np.arange(L + m0, n)
    cols = [xc[rows - 1 - i] for i in range(p)] + [eps[rows - 1 - j] for j in range(q)]
    X = np.column_stack(cols) if cols else np.empty((rows.size, 0))
    beta, *_ = np.linalg.lstsq(X, xc[rows], rcond=None)
    return beta[:p], beta[p : p + q], mu


def _start_vector(phi0, theta0, mu0, p, q):
    """Map a rough coefficient guess into the unconstrained search space."""
    z = np.zeros(p + q + 1)
    try:
        r = ar_to_pacf(phi0) if p else np.empty(0)
        u = ma_to_pacf(theta0) if q else np.empty(0)
        z[:p] = np.arctanh(np.clip(r / _PACF_SHRINK, -0.98, 0.98))
        z[p : p + q] = np.arctanh(np.clip(u / _PACF_SHRINK, -0.98, 0.98))
    except ValueError:
        pass  # invalid warm start, keep zeros
    z[-1] = mu0
    return z


def fit(series, p: int, q: int, seed=0, n_restarts: int = 3):
    """Maximum-likelihood ARMA(p, q) fit with jointly estimated mean.

    The exact Gaussian likelihood is maximised by Nelder-Mead search in the
    unconstrained partial-autocorrelation space (innovation variance
    concentrated out), from a conditional-least-squares warm start plus
    ``n_restarts`` random restarts drawn uniformly from the cube; the best
    optimum is polished until successive improvement falls below 1e-8.

    Parameters
    ----------
    series : array_like
        Observations; length must exceed p + q + 1.
    p, q : int
        AR and MA orders.
    seed : int, SeedSequence or Generator
        Source of the restart draws; fixed seed gives a deterministic fit.
    n_restarts : int
        Number of random restarts (minimum 3).

    Returns
    -------
    (ArmaModel, ndarray)
        The fitted model and its one-step innovation estimates (same length
        as the series).

    Raises
    ------
    FitError
        Series too short, constant, or the optimizer failed from every start.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if p < 0 or q < 0:
        raise ValueError("orders must be non-negative")
    if n <= p + q + 1:
        raise FitError(f"series too short: need more than {p + q + 1} observations, got {n}")
    if not np.all(np.isfinite(x)):
        raise FitError("series contains non-finite values")
    xbar = float(x.mean())
    scale = float(x.std())
    if scale <= 0.0 or not math.isfinite(scale):
        raise FitError("constant series (zero variance)")
    if n_restarts < 3:
        raise ValueError("contract requires at least 3 random restarts")

    xs = (x - xbar) / scale

    if p == 0 and q == 0:
        mu = xbar
        sigma2 = float(np.mean((x - mu) ** 2))
        ll = -0.5 * n * (_LOG_2PI + math.log(sigma2) + 1.0)
        model = ArmaModel(0, 0, np.empty(0), np.empty(0), mu, sigma2, ll, n)
        return model, x - mu

    def unpack(z):
        r = _PACF_SHRINK * np.tanh(z)
        phi = pacf_to_ar(r[:p]) if p else np.empty(0)
        theta = pacf_to_ma(r[p : p + q]) if q else np.empty(0)
        return phi, theta, z[-1]

    def objective(z):
        phi, theta, mu = unpack(z)
        logdet, quad = _loglik_terms(xs - mu, phi, theta)
        if not (math.isfinite(logdet) and math.isfinite(quad)) or quad <= 0.0:
            return _OBJECTIVE_BIG
        sigma2 = quad / n
        ll = -0.5 * (n * (_LOG_2PI + 1.0) + n * math.log(sigma2) + logdet)
        if not math.isfinite(ll):
            return _OBJECTIVE_BIG
        return -ll

    rng = seeding.generator(seed)
    phi0, theta0, mu0 = _hannan_rissanen_start(xs, p, q)
    starts = [_start_vector(phi0, theta0, mu0, p, q)]
    for _ in range(n_restarts):
        z = np.zeros(p + q + 1)
        cube = rng.uniform(-1.0, 1.0, size=p + q)
        z[: p + q] = np.arctanh(np.clip(cube, -0.995, 0.995))
        starts.append(z)

    dim = p + q + 1
    best_z, best_f = None, math.inf
    for z0 in starts:
        res = optimize.minimize(
            objective, z0, method="Nelder-Mead",
            options={"maxfev": 80 * dim, "fatol": 1e-6, "xatol": 1e-4},
        )
        if res.fun < best_f:
            best_z, best_f = res.x, res.fun
    if best_z is None or best_f >= _OBJECTIVE_BIG:
        raise FitError(f"optimizer failed for ARMA({p},{q}) after {n_restarts} restarts")

    res = optimize.minimize(
        objective, best_z, method="Nelder-Mead",
        options={"maxfev": 400 * dim, "fatol": 1e-10, "xatol": 1e-8},
    )
    if res.fun < best_f:
        best_z, best_f = res.x, res.fun
    if best_f >= _OBJECTIVE_BIG:
        raise FitError(f"optimizer failed for ARMA({p},{q})")

    phi, theta, mu_s = unpack(best_z)
    logdet, quad = _loglik_terms(xs - mu_s, phi, theta)
    sigma2_s = quad / n
    mu = xbar + scale * mu_s
    sigma2 = scale**2 * sigma2_s
    # At the concentrated optimum the quadratic form equals n exactly.
    ll = -0.5 * (n * _LOG_2PI + n * math.log(sigma2) + logdet + n)
    model = ArmaModel(p, q, phi, theta, mu, sigma2, ll, n)
    return model, conditional_residuals(model, x)


# ---------------------------------------------------------------------------
# forecasting and simulation

def forecast_one_step(model: ArmaModel, history, residual_history) -> float:
    """Deterministic one-step-ahead forecast.

    mu + sum_i phi_i (x_{t-i} - mu) + sum_j theta_j eps_{t-j}, using the last
    p values of ``history`` and the last q entries of ``residual_history``.
    """
    h = np.asarray(history, dtype=float)
    r = np.asarray(residual_history, dtype=float)
    if h.size < model.p:
        raise ValueError(f"need at least {model.p} history values, got {h.size}")
    if r.size < model.q:
        raise ValueError(f"need at least {model.q} residual values, got {r.size}")
    mu = model.intercept
    out = mu
    if model.p:
        out += float(model.phi @ (h[::-1][: model.p] - mu))
    if model.q:
        out += float(model.theta @ r[::-1][: model.q])
    return out


def simulate(model: ArmaModel, horizon: int, history, residual_history, seed=None) -> np.ndarray:
    """One sampled path of length ``horizon``, conditional on the given tails.

    Each step draws eps ~ N(0, sigma2) and applies the model recursion; with
    sigma2 = 0 the path equals the iterated deterministic forecast. The draw
    sequence is fully determined by ``seed``.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    h = list(np.asarray(history, dtype=float)[::-1][: model.p][::-1])
    r = list(np.asarray(residual_history, dtype=float)[::-1][: model.q][::-1])
    if len(h) < model.p:
        raise ValueError(f"need at least {model.p} history values, got {len(h)}")
    if len(r) < model.q:
        raise ValueError(f"need at least {model.q} residual values, got {len(r)}")
    rng = seeding.generator(seed)
    sd = math.sqrt(model.sigma2)
    out = np.empty(horizon)
    for t in range(horizon):
        mean_part = forecast_one_step(model, h, r) if (model.p or model.q) else model.intercept
        eps = rng.normal(0.0, sd)
        val = mean_part + eps
        out[t] = val
        if model.p:
            h.append(val)
            h = h[-model.p :]
        if model.q:
            r.append(eps)
            r = r[-model.q :]
    return out
