"""Day-ahead Monte Carlo scenario generation and quantile bands.

Each scenario is one synthetic day: for every modelled hour a single
one-step-ahead draw from that hour's model, conditional on the end of its
training history; night hours are identically zero. Hours are sampled
independently (each hour has its own model; no cross-hour dependence is
imposed: a known limitation of the hour-by-hour construction). Raw draws
below zero are counted and then truncated to zero, since negative power is
physically meaningless; draws below -5 MW are counted separately as a
diagnostic of how far into the negative region the fitted noise reaches.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import arma, seeding
from .errors import MissingModelError
from .selection import FitReport
from .series import NightMask

DEFAULT_N_SCENARIOS = 2000
DEFAULT_PROBS = (0.1, 0.5, 0.9)

SCENARIO_CSV_HEADER = ("scenario_id",) + tuple(f"h{h:02d}" for h in range(24))


@dataclass(frozen=True)
class ScenarioSet:
    """Matrix of sampled days plus the truncation diagnostics.

    ``scenarios`` is n_scenarios x 24 (MW, already truncated at zero);
    ``truncated_count`` and ``below_neg5_count`` refer to the raw draws
    before truncation, over modelled hours only.
    """

    scenarios: np.ndarray
    seed: int
    truncated_count: int
    below_neg5_count: int
    modeled_hours: tuple

    def __post_init__(self):
        m = np.asarray(self.scenarios, dtype=float)
        if m.ndim != 2 or m.shape[1] != 24:
            raise ValueError("scenarios must be an n x 24 matrix")
        if m.shape[0] < 1:
            raise ValueError("scenario set is empty")
        if np.any(m < 0):
            raise ValueError("scenario matrix contains a negative value")
        night = [h for h in range(24) if h not in self.modeled_hours]
        if night and np.any(m[:, night] != 0.0):
            raise ValueError("night-hour column contains a nonzero value")
        m.setflags(write=False)
        object.__setattr__(self, "scenarios", m)
        object.__setattr__(self, "modeled_hours", tuple(int(h) for h in self.modeled_hours))

    @property
    def n_scenarios(self) -> int:
        return int(self.scenarios.shape[0])


@dataclass(frozen=True)
class QuantileBands:
    """Per-hour empirical quantiles of a scenario set.

    ``values[h, j]`` is the quantile at ``probs[j]`` for hour h; rows are
    nondecreasing along the probability axis.
    """

    probs: tuple
    values: np.ndarray

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        vals = np.asarray(self.values, dtype=float)
        if any(not 0.0 < p < 1.0 for p in probs):
            raise ValueError("probabilities must lie in (0, 1)")
        if list(probs) != sorted(probs) or len(set(probs)) != len(probs):
            raise ValueError("probabilities must be strictly increasing")
        if vals.shape != (24, len(probs)):
            raise ValueError("values must be 24 x len(probs)")
        if np.any(np.diff(vals, axis=1) < 0):
            raise ValueError("quantiles must be nondecreasing in p")
        vals.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "values", vals)

    def column(self, prob: float) -> np.ndarray:
        for j, p in enumerate(self.probs):
            if abs(p - prob) < 1e-12:
                return self.values[:, j]
        raise KeyError(f"probability {prob} not among {self.probs}")

    @property
    def q10(self) -> np.ndarray:
        return self.column(0.1)

    @property
    def median(self) -> np.ndarray:
        return self.column(0.5)

    @property
    def q90(self) -> np.ndarray:
        return self.column(0.9)


def generate_scenarios(reports, mask: NightMask, n: int = DEFAULT_N_SCENARIOS,
                       seed: int = 0) -> ScenarioSet:
    """Sample ``n`` day-ahead scenarios from the per-hour models.

    Each scenario row draws from its own substream of ``seed`` (key = row
    index), so the result is byte-identical for a fixed seed regardless of
    how rows are scheduled. Within a row, modelled hours are visited in hour
    order and each takes one draw via the model's one-step simulation,
    conditioned on the training tails stored in the report.

    Raises MissingModelError when ``reports`` lacks a usable model for some
    modelled hour.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    by_hour = {r.hour: r for r in reports if isinstance(r, FitReport)}
    missing = [h for h in mask.modeled_hours if h not in by_hour]
    if missing:
        raise MissingModelError(f"no model for modelled hours {missing}")

    matrix = np.zeros((n, 24))
    truncated = 0
    below5 = 0
    for i in range(n):
        rng = seeding.generator(seeding.child_sequence(seed, i))
        for h in mask.modeled_hours:
            rep = by_hour[h]
            raw = float(arma.simulate(rep.model, 1, rep.value_tail,
                                      rep.residual_tail, seed=rng)[0])
            if raw < 0.0:
                truncated += 1
            if raw < -5.0:
                below5 += 1
            matrix[i, h] = max(raw, 0.0)
    return ScenarioSet(matrix, int(seed), truncated, below5, mask.modeled_hours)


def quantile_bands(sset: ScenarioSet, probs=DEFAULT_PROBS) -> QuantileBands:
    """Per-hour empirical quantiles under the linear-interpolation convention.

    The quantile at probability p sits at position (n - 1) p + 1 among the
    order statistics, linearly interpolated between neighbours (numpy's
    default method).
    """
    if sset.n_scenarios < 2:
        raise ValueError("need at least 2 scenarios for quantiles")
    probs = tuple(float(p) for p in probs)
    vals = np.quantile(sset.scenarios, probs, axis=0, method="linear").T
    return QuantileBands(probs, vals)


def negative_rate_report(sset: ScenarioSet) -> tuple:
    """(fraction of raw draws < 0, fraction < -5 MW), over modelled-hour draws."""
    denom = sset.n_scenarios * len(sset.modeled_hours)
    if denom == 0:
        raise ValueError("scenario set has no modelled hours")
    return sset.truncated_count / denom, sset.below_neg5_count / denom


def _fmt(x: float) -> str:
    return repr(float(x))


def write_scenarios_csv(sset: ScenarioSet, dest) -> None:
    """Scenario matrix as CSV: header ``scenario_id,h00,...,h23``."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_scenarios_csv(sset, fh)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(SCENARIO_CSV_HEADER)
    for i, row in enumerate(sset.scenarios):
        writer.writerow([i] + [_fmt(v) for v in row])


def quantile_label(prob: float) -> str:
    return "median" if abs(prob - 0.5) < 1e-12 else f"q{100.0 * prob:g}"


def write_quantiles_csv(bands: QuantileBands, dest) -> None:
    """Quantile bands as CSV; default probabilities give ``hour,q10,median,q90``."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_quantiles_csv(bands, fh)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(["hour"] + [quantile_label(p) for p in bands.probs])
    for h in range(24):
        writer.writerow([h] + [_fmt(v) for v in bands.values[h]])
