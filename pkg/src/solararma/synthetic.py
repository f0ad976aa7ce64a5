"""Seeded synthetic data generators used by the test-bench and the demos.

Real plant data cannot ship with the package, so the statistical contracts
are exercised on data with known ground truth: plain ARMA draws for the
estimation checks, and a diurnal solar-like series (bell-shaped mean profile
with per-hour AR(1) deviations, zero at night) for the pipeline-level ones.
"""

from __future__ import annotations

import numpy as np

from . import seeding
from .arma import ArmaModel, simulate
from .series import SolarSeries

# Bell profile spans 06:00-19:00 inclusive: 14 modelled hours, nights zero.
DAYLIGHT_HOURS = tuple(range(6, 20))
NIGHT_HOURS = tuple(h for h in range(24) if h not in DAYLIGHT_HOURS)


def arma_sample(phi, theta, intercept: float, sigma2: float, n: int,
                seed=None, burn: int = 500) -> np.ndarray:
    """Draw ``n`` values from a stationary ARMA model after a burn-in.

    The recursion starts at the process mean with zero innovation history;
    ``burn`` discarded steps remove the transient.
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    model = ArmaModel(phi.size, theta.size, phi, theta, intercept, sigma2)
    path = simulate(model, n + burn,
                    [intercept] * max(model.p, 1), [0.0] * max(model.q, 1), seed)
    return path[burn:]


def bell_profile(peak_mw: float = 1200.0) -> np.ndarray:
    """Deterministic 24-hour mean profile (MW): sin^2 arch over the daylight window."""
    prof = np.zeros(24)
    lo, hi = DAYLIGHT_HOURS[0], DAYLIGHT_HOURS[-1]
    for h in DAYLIGHT_HOURS:
        prof[h] = peak_mw * np.sin(np.pi * (h - lo + 0.5) / (hi - lo + 1)) ** 2
    return prof


def diurnal_series(n_days: int, seed=0, *, peak_mw: float = 1200.0,
                   ar: float = 0.6, noise_frac: float = 0.15,
                   start_date: str = "2019-01-01", clip: bool = True) -> SolarSeries:
    """Solar-like hourly series: bell-shaped mean plus per-hour AR(1) deviations.

    Each daylight hour h carries its own AR(1) process across days,
    d_t = ar * d_{t-1} + eta_t with eta ~ N(0, (noise_frac * mu_h)^2), added to
    the profile mean mu_h. Night hours are identically zero. Each hour's
    deviations come from an independent substream of ``seed``, so the series
    is reproducible and hours are statistically independent.

    With ``clip`` (default) values are floored at zero like real power data;
    the floor rarely binds at the default noise level.
    """
    if n_days < 1:
        raise ValueError("n_days must be >= 1")
    prof = bell_profile(peak_mw)
    dev = np.zeros((n_days, 24))
    for h in DAYLIGHT_HOURS:
        rng = seeding.generator(seeding.child_sequence(seed, h))
        sd = noise_frac * prof[h]
        # Stationary start: the initial deviation already has the full AR(1) variance.
        prev = rng.normal(0.0, sd / np.sqrt(1.0 - ar**2)) if sd > 0 else 0.0
        eta = rng.normal(0.0, sd, size=n_days)
        d = np.empty(n_days)
        for t in range(n_days):
            prev = ar * prev + eta[t]
            d[t] = prev
        dev[:, h] = d
    values = prof[None, :] + dev
    values[:, list(NIGHT_HOURS)] = 0.0
    if clip:
        np.clip(values, 0.0, None, out=values)
    t0 = np.datetime64(start_date, "h")
    ts = t0 + np.arange(n_days * 24, dtype="int64").astype("timedelta64[h]")
    return SolarSeries(ts, values.reshape(-1))
