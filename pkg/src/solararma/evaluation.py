"""Forecast accuracy metrics and the baseline comparison.

Three one-step-ahead methods are compared on an identical held-out window:

* hourly ARMA: one model per modelled hour, the package's main method;
* single ARMA: one model fit on the whole chronological series, night zeros
  included, selected by the same BIC grid procedure;
* Smart-Persistence: the value at hour t predicted by the mean of the
  previous ``window`` clock-hours (window=2 by default).

All methods freeze their parameters after training and roll one step at a
time through the test window; metrics are computed over the modelled-hour
test points only, which are byte-for-byte the same points for every method.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arma import ArmaModel, conditional_residuals
from .errors import SelectionError
from .selection import (WHOLE_SERIES_TAG, DEFAULT_LB_LAGS, FailedHour, FitReport,
                        OrderGrid, fit_all_hours, grid_search)
from .series import NightMask, SolarSeries, slice_by_hour, split_at_date, split_by_days

DEFAULT_SP_WINDOW = 2

METHOD_NAMES = ("hourly_arma", "single_arma", "smart_persistence")


@dataclass(frozen=True)
class MetricReport:
    """Accuracy summary; percentages are relative to the maximum actual value."""

    mae: float
    rmse: float
    mae_pct_of_max: float
    rmse_pct_of_max: float
    n_points: int

    def __post_init__(self):
        if not (0.0 <= self.mae <= self.rmse * (1 + 1e-12)):
            raise ValueError("requires 0 <= mae <= rmse")
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")

    def to_dict(self) -> dict:
        return {
            "mae": self.mae,
            "rmse": self.rmse,
            "mae_pct_of_max": self.mae_pct_of_max,
            "rmse_pct_of_max": self.rmse_pct_of_max,
            "n_points": self.n_points,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        return cls(float(d["mae"]), float(d["rmse"]), float(d["mae_pct_of_max"]),
                   float(d["rmse_pct_of_max"]), int(d["n_points"]))


def _check_pair(actual, predicted):
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.shape != p.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {p.shape}")
    if a.size == 0:
        raise ValueError("empty input")
    return a, p


def mae(actual, predicted) -> float:
    """Mean absolute error."""
    a, p = _check_pair(actual, predicted)
    return float(np.mean(np.abs(a - p)))


def rmse(actual, predicted) -> float:
    """Root mean square error."""
    a, p = _check_pair(actual, predicted)
    return float(np.sqrt(np.mean((a - p) ** 2)))


def metric_report(actual, predicted) -> MetricReport:
    """MAE/RMSE plus percent-of-maximum forms, over one evaluation window."""
    a, p = _check_pair(actual, predicted)
    peak = float(np.max(a))
    if peak <= 0.0:
        raise ValueError("maximum actual value must be positive for percentage metrics")
    m, r = mae(a, p), rmse(a, p)
    return MetricReport(m, r, 100.0 * m / peak, 100.0 * r / peak, a.size)


def smart_persistence(values, window: int = DEFAULT_SP_WINDOW) -> np.ndarray:
    """Rolling-mean persistence forecast over a chronological sequence.

    Returns an array aligned with ``values``: position t holds the mean of
    the ``window`` preceding values, NaN for the first ``window`` positions.
    """
    v = np.asarray(values, dtype=float)
    if window < 1:
        raise ValueError("window must be >= 1")
    if v.size <= window:
        raise ValueError(f"need more than {window} observations, got {v.size}")
    out = np.full(v.size, np.nan)
    csum = np.concatenate(([0.0], np.cumsum(v)))
    out[window:] = (csum[window:-1] - csum[:-window - 1]) / window
    return out


def _sp_day_aware(day_index, values, window: int):
    """Smart-Persistence over a modelled-hour sequence with day boundaries.

    The window must lie entirely within the target's own day (no same-day
    prior daylight hour exists for the first hours of a day). Where it does
    not, the prediction falls back to the most recent nonzero value, and the
    position is flagged.
    """
    v = np.asarray(values, dtype=float)
    days = np.asarray(day_index)
    pred = np.empty(v.size)
    fallback = np.zeros(v.size, dtype=bool)
    last_nonzero = 0.0
    for t in range(v.size):
        if t >= window and np.all(days[t - window: t] == days[t]):
            pred[t] = float(np.mean(v[t - window: t]))
        else:
            pred[t] = last_nonzero
            fallback[t] = True
        if v[t] > 0.0:
            last_nonzero = v[t]
    return pred, fallback


def _sp_same_hour(hours, values, window: int):
    """Variant reading "previous h hours" as the same hour of the previous days."""
    v = np.asarray(values, dtype=float)
    hrs = np.asarray(hours)
    pred = np.empty(v.size)
    fallback = np.zeros(v.size, dtype=bool)
    history: dict = {}
    last_nonzero = 0.0
    for t in range(v.size):
        h = int(hrs[t])
        past = history.setdefault(h, [])
        if len(past) >= window:
            pred[t] = float(np.mean(past[-window:]))
        else:
            pred[t] = last_nonzero
            fallback[t] = True
        past.append(v[t])
        if v[t] > 0.0:
            last_nonzero = v[t]
    return pred, fallback


def _observed_chronological(series: SolarSeries):
    keep = ~np.isnan(series.power)
    return series.power[keep], series.hour_of_day[keep], series.day_index[keep]


def _split(series: SolarSeries, split):
    if isinstance(split, float):
        return split_by_days(series, split)
    return split_at_date(series, split)


def _rolling_hourly_predictions(reports, train, test, modeled_hours):
    """Frozen-parameter one-step predictions per hour over the test window.

    The one-step forecast at test position t is x_t minus the innovation the
    model assigns there, with innovations run over training history plus the
    already-realised test values: exactly the rolling protocol.
    """
    by_hour = {r.hour: r for r in reports}
    pred = np.full(len(test), np.nan)
    test_hours = test.hour_of_day
    observed = ~np.isnan(test.power)
    for h in modeled_hours:
        te = slice_by_hour(test, h)
        if len(te) == 0:
            continue
        tr = slice_by_hour(train, h)
        full = np.concatenate([tr.values, te.values])
        resid = conditional_residuals(by_hour[h].model, full)
        one_step = full - resid
        idx = np.where((test_hours == h) & observed)[0]
        pred[idx] = one_step[len(tr):]
    return pred


@dataclass(frozen=True)
class ComparisonTable:
    """Table-style comparison of the three methods on one test window."""

    metrics: dict
    n_points: int
    sp_fallback_count: int
    single_model: ArmaModel
    single_order: tuple

    def __post_init__(self):
        if tuple(self.metrics) != METHOD_NAMES:
            raise ValueError(f"metrics must cover {METHOD_NAMES} in order")
        if len({m.n_points for m in self.metrics.values()}) != 1:
            raise ValueError("methods evaluated on differing point counts")

    ROW_FIELDS = ("mae_mw", "rmse_mw", "mae_pct_of_max", "rmse_pct_of_max")

    def _row(self, field: str):
        attr = {"mae_mw": "mae", "rmse_mw": "rmse"}.get(field, field)
        return [getattr(self.metrics[name], attr) for name in METHOD_NAMES]

    def to_text(self) -> str:
        width = 18
        lines = ["metric".ljust(width) + "".join(name.rjust(width) for name in METHOD_NAMES)]
        for field in self.ROW_FIELDS:
            cells = "".join(f"{v:>{width}.4f}" for v in self._row(field))
            lines.append(field.ljust(width) + cells)
        lines.append(f"n_points={self.n_points}  sp_fallbacks={self.sp_fallback_count}  "
                     f"single_order=({self.single_order[0]},{self.single_order[1]})")
        return "\n".join(lines)

    def write_csv(self, dest) -> None:
        if isinstance(dest, (str, Path)):
            with open(dest, "w", newline="") as fh:
                self.write_csv(fh)
            return
        writer = csv.writer(dest, lineterminator="\n")
        writer.writerow(["metric"] + list(METHOD_NAMES))
        for field in self.ROW_FIELDS:
            writer.writerow([field] + [repr(float(v)) for v in self._row(field)])
        writer.writerow(["n_points"] + [self.n_points] * len(METHOD_NAMES))

    def to_dict(self) -> dict:
        return {
            "metrics": {name: m.to_dict() for name, m in self.metrics.items()},
            "n_points": self.n_points,
            "sp_fallback_count": self.sp_fallback_count,
            "single_order": list(self.single_order),
        }


def fit_single_arma(series: SolarSeries, grid: OrderGrid, *, split=0.2, seed=0):
    """Whole-series baseline: one model on the full chronological sequence.

    Night hours enter as zeros; the grid and BIC selection are the same as
    the per-hour procedure. Returns the model and its accuracy over the
    observed test points under the rolling one-step protocol (all hours).
    """
    train, test = _split(series, split)
    train_vals, _, _ = _observed_chronological(train)
    test_vals, _, _ = _observed_chronological(test)
    if test_vals.size == 0:
        raise ValueError("test window has no observations")
    _, chosen, model, _ = grid_search(train_vals, grid, seed=seed, tag=WHOLE_SERIES_TAG)
    full = np.concatenate([train_vals, test_vals])
    one_step = full - conditional_residuals(model, full)
    return model, metric_report(test_vals, one_step[train_vals.size:])


def compare_models(series: SolarSeries, mask: NightMask, grid: OrderGrid, *,
                   split=0.2, sp_window: int = DEFAULT_SP_WINDOW,
                   sp_same_hour: bool = False, lags=DEFAULT_LB_LAGS,
                   seed: int = 0) -> ComparisonTable:
    """Fit all three methods on the training days, score them on the test days.

    Every method is evaluated on the identical set of points: observed test
    rows at modelled hours. Raises SelectionError when any modelled hour (or
    the whole-series fit) cannot produce a model.
    """
    train, test = _split(series, split)

    reports = fit_all_hours(train, mask, grid, lags=lags, seed=seed)
    failed = [r for r in reports if isinstance(r, FailedHour)]
    if failed:
        detail = "; ".join(f"hour {r.hour:02d}: {r.error}" for r in failed)
        raise SelectionError(f"hourly fit failed: {detail}")

    modeled = mask.modeled_hours
    test_hours = test.hour_of_day
    observed = ~np.isnan(test.power)
    point_sel = observed & np.isin(test_hours, modeled)
    if not point_sel.any():
        raise ValueError("test window has no modelled-hour observations")
    actual = test.power[point_sel]

    pred_hourly = _rolling_hourly_predictions(reports, train, test, modeled)[point_sel]
    if np.any(np.isnan(pred_hourly)):
        raise SelectionError("hourly predictions incomplete over the test window")

    vals_tr, hrs_tr, days_tr = _observed_chronological(train)
    vals_te, hrs_te, days_te = _observed_chronological(test)
    keep_tr = np.isin(hrs_tr, modeled)
    keep_te = np.isin(hrs_te, modeled)

    # Single whole-series model: one-step over the chronological sequence,
    # then keep the modelled-hour test positions.
    _, single_order, single_model, _ = grid_search(vals_tr, grid, seed=seed,
                                                  tag=WHOLE_SERIES_TAG)
    full = np.concatenate([vals_tr, vals_te])
    one_step = full - conditional_residuals(single_model, full)
    pred_single = one_step[vals_tr.size:][keep_te]

    # Smart-Persistence over the modelled-hour sequence, train history included.
    sp_vals = np.concatenate([vals_tr[keep_tr], vals_te[keep_te]])
    sp_days = np.concatenate([days_tr[keep_tr], days_te[keep_te] + days_tr.max()])
    sp_hours = np.concatenate([hrs_tr[keep_tr], hrs_te[keep_te]])
    if sp_same_hour:
        sp_pred_all, sp_fb = _sp_same_hour(sp_hours, sp_vals, sp_window)
    else:
        sp_pred_all, sp_fb = _sp_day_aware(sp_days, sp_vals, sp_window)
    n_test_points = int(np.count_nonzero(keep_te))
    pred_sp = sp_pred_all[-n_test_points:]
    fb_count = int(np.count_nonzero(sp_fb[-n_test_points:]))

    metrics = {
        "hourly_arma": metric_report(actual, pred_hourly),
        "single_arma": metric_report(actual, pred_single),
        "smart_persistence": metric_report(actual, pred_sp),
    }
    return ComparisonTable(metrics, int(actual.size), fb_count,
                           single_model, single_order)
