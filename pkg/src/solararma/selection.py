"""Per-hour model selection: stationarity check, order grid, BIC, validation.

For one hour-of-day subsequence the procedure is: run the ADF unit-root test,
fit every (p, q) in the order grid by exact maximum likelihood, pick the fit
with the smallest BIC, then run Ljung-Box tests on the chosen model's
residuals. Diagnostic failures (ADF not rejecting, Ljung-Box rejecting,
individual grid cells not converging) are recorded in the report rather than
aborting, because the surrounding pipeline needs a model per hour as long as
at least one candidate fit succeeded.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from . import arma, diagnostics, seeding
from .errors import FitError, SelectionError
from .series import HourSlice, NightMask, SolarSeries, slice_by_hour

DEFAULT_LB_LAGS = (5, 10, 15)

# Spawn-key tag for whole-series (not hour-specific) grid searches; real
# hours occupy 0..23 so this can never collide.
WHOLE_SERIES_TAG = 24


@dataclass(frozen=True)
class OrderGrid:
    """Inclusive (p, q) order ranges; the default 1..4 x 1..4 gives 16 candidates."""

    p_min: int = 1
    p_max: int = 4
    q_min: int = 1
    q_max: int = 4

    def __post_init__(self):
        for lo, hi, name in ((self.p_min, self.p_max, "p"), (self.q_min, self.q_max, "q")):
            if lo < 0 or hi < lo:
                raise ValueError(f"empty or negative {name}-range [{lo}, {hi}]")

    @classmethod
    def square(cls, max_order: int) -> "OrderGrid":
        return cls(1, max_order, 1, max_order)

    @property
    def cells(self) -> tuple:
        return tuple((p, q)
                     for p in range(self.p_min, self.p_max + 1)
                     for q in range(self.q_min, self.q_max + 1))

    @property
    def max_order(self) -> int:
        return max(self.p_max, self.q_max)

    def to_dict(self) -> dict:
        return {"p_min": self.p_min, "p_max": self.p_max,
                "q_min": self.q_min, "q_max": self.q_max}

    @classmethod
    def from_dict(cls, d: dict) -> "OrderGrid":
        return cls(int(d["p_min"]), int(d["p_max"]), int(d["q_min"]), int(d["q_max"]))


@dataclass(frozen=True)
class GridCell:
    """Outcome of one (p, q) candidate fit."""

    p: int
    q: int
    loglik: Optional[float]
    bic: Optional[float]
    ok: bool
    message: str = ""

    def to_list(self) -> list:
        return [self.p, self.q, self.loglik, self.bic, self.ok, self.message]

    @classmethod
    def from_list(cls, row) -> "GridCell":
        p, q, loglik, bic_v, ok, message = row
        return cls(int(p), int(q),
                   None if loglik is None else float(loglik),
                   None if bic_v is None else float(bic_v),
                   bool(ok), str(message))


@dataclass(frozen=True)
class FitReport:
    """Everything select_model learned about one hour.

    ``value_tail`` and ``residual_tail`` hold the last p training values and
    last q training innovations of the chosen model, so forecasting and
    scenario generation can condition on the end of training without
    re-reading the data.
    """

    hour: int
    n_train: int
    adf: Optional[diagnostics.AdfResult]
    grid: tuple
    chosen: tuple
    model: arma.ArmaModel
    ljung_box: tuple
    value_tail: tuple
    residual_tail: tuple
    warnings: tuple = ()

    def __post_init__(self):
        if self.chosen != (self.model.p, self.model.q):
            raise ValueError("chosen order disagrees with the stored model")
        if len(self.value_tail) != self.model.p or len(self.residual_tail) != self.model.q:
            raise ValueError("conditioning tails must match the chosen order")
        ok_bics = [c.bic for c in self.grid if c.ok]
        chosen_cell = next((c for c in self.grid if (c.p, c.q) == self.chosen), None)
        if chosen_cell is None or not chosen_cell.ok:
            raise ValueError("chosen order missing from the successful grid cells")
        if ok_bics and chosen_cell.bic > min(ok_bics) + 1e-9:
            raise ValueError("chosen order does not minimize BIC")
        for lb in self.ljung_box:
            if lb.dof != lb.lag - (self.model.p + self.model.q):
                raise ValueError("Ljung-Box dof inconsistent with the chosen order")

    def to_dict(self) -> dict:
        return {
            "hour": self.hour,
            "n_train": self.n_train,
            "adf": None if self.adf is None else self.adf.to_dict(),
            "grid": [c.to_list() for c in self.grid],
            "chosen": list(self.chosen),
            "model": self.model.to_dict(),
            "ljung_box": [lb.to_dict() for lb in self.ljung_box],
            "value_tail": list(self.value_tail),
            "residual_tail": list(self.residual_tail),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FitReport":
        return cls(
            hour=int(d["hour"]),
            n_train=int(d["n_train"]),
            adf=None if d["adf"] is None else diagnostics.AdfResult.from_dict(d["adf"]),
            grid=tuple(GridCell.from_list(row) for row in d["grid"]),
            chosen=tuple(int(v) for v in d["chosen"]),
            model=arma.ArmaModel.from_dict(d["model"]),
            ljung_box=tuple(diagnostics.LjungBoxResult.from_dict(x) for x in d["ljung_box"]),
            value_tail=tuple(float(v) for v in d["value_tail"]),
            residual_tail=tuple(float(v) for v in d["residual_tail"]),
            warnings=tuple(str(w) for w in d["warnings"]),
        )


@dataclass(frozen=True)
class FailedHour:
    """Placeholder report for an hour whose selection failed outright."""

    hour: int
    error: str

    def to_dict(self) -> dict:
        return {"hour": self.hour, "error": self.error}

    @classmethod
    def from_dict(cls, d: dict) -> "FailedHour":
        return cls(int(d["hour"]), str(d["error"]))


def grid_search(values, grid: OrderGrid, seed=0, tag: int = WHOLE_SERIES_TAG):
    """Fit every (p, q) candidate on ``values`` and pick the BIC minimizer.

    Each cell draws its optimizer restarts from the substream keyed by
    (seed, tag, p, q), so results do not depend on evaluation order. Ties in
    BIC break toward smaller p + q, then smaller p.

    Returns (cells, chosen, model, residuals); raises SelectionError when no
    candidate fit converged.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    cells = []
    fits = {}
    for p, q in grid.cells:
        try:
            model, resid = arma.fit(values, p, q,
                                    seed=seeding.child_sequence(seed, tag, p, q))
            cells.append(GridCell(p, q, model.loglik,
                                  diagnostics.bic(model.loglik, n, p, q), True))
            fits[(p, q)] = (model, resid)
        except FitError as exc:
            cells.append(GridCell(p, q, None, None, False, str(exc)))
    ok = [c for c in cells if c.ok]
    if not ok:
        raise SelectionError(f"all {len(cells)} grid fits failed")
    best = min(ok, key=lambda c: (c.bic, c.p + c.q, c.p))
    model, resid = fits[(best.p, best.q)]
    return tuple(cells), (best.p, best.q), model, resid


def select_model(hour_slice: HourSlice, grid: OrderGrid, *,
                 lags=DEFAULT_LB_LAGS, seed=0) -> FitReport:
    """Full validated-model selection for one hour of day.

    ADF and Ljung-Box outcomes are recorded whatever they say; warnings are
    attached when the unit root is not rejected, when residual whiteness is
    rejected, or when a diagnostic could not run at all (series too short for
    its regression, lag not exceeding the parameter count).

    Raises SelectionError when the slice is empty or every grid fit failed.
    """
    values = hour_slice.values
    hour = hour_slice.hour
    if values.size == 0:
        raise SelectionError(f"hour {hour:02d}: no observations")
    warnings = []

    adf = None
    try:
        adf = diagnostics.adf_test(values)
        if not adf.reject_unit_root:
            warnings.append(
                f"hour {hour:02d}: unit root not rejected "
                f"(ADF {adf.statistic:.3f} vs {adf.critical_value_5pct:.3f}); "
                "the series may need differencing"
            )
    except ValueError as exc:
        warnings.append(f"hour {hour:02d}: ADF test skipped ({exc})")

    try:
        cells, chosen, model, resid = grid_search(values, grid, seed=seed, tag=hour)
    except SelectionError as exc:
        raise SelectionError(f"hour {hour:02d}: {exc}") from exc

    lb_results = []
    fitted_params = model.p + model.q
    for lag in lags:
        try:
            lb = diagnostics.ljung_box(resid, lag, fitted_params=fitted_params)
        except ValueError as exc:
            warnings.append(f"hour {hour:02d}: Ljung-Box at lag {lag} skipped ({exc})")
            continue
        lb_results.append(lb)
        if lb.reject_white:
            warnings.append(
                f"hour {hour:02d}: Ljung-Box rejects residual whiteness at lag {lag} "
                f"(Q={lb.statistic:.2f} > {lb.critical_value_5pct:.2f})"
            )

    value_tail = tuple(float(v) for v in values[values.size - model.p:])
    residual_tail = tuple(float(v) for v in resid[resid.size - model.q:]) if model.q else ()
    return FitReport(
        hour=hour,
        n_train=int(values.size),
        adf=adf,
        grid=cells,
        chosen=chosen,
        model=model,
        ljung_box=tuple(lb_results),
        value_tail=value_tail,
        residual_tail=residual_tail,
        warnings=tuple(warnings),
    )


def fit_all_hours(series: SolarSeries, mask: NightMask, grid: OrderGrid, *,
                  lags=DEFAULT_LB_LAGS, seed=0) -> list:
    """One report per modelled hour, in hour order.

    An hour whose selection fails contributes a FailedHour entry carrying the
    error; the remaining hours are unaffected. An hour with more than 5% of
    its days missing gets a warning on its report.
    """
    reports: list[Union[FitReport, FailedHour]] = []
    n_days = series.n_days
    for hour in mask.modeled_hours:
        sl = slice_by_hour(series, hour)
        try:
            report = select_model(sl, grid, lags=lags, seed=seed)
        except (SelectionError, FitError) as exc:
            reports.append(FailedHour(hour, str(exc)))
            continue
        missing = n_days - len(sl)
        if missing > 0.05 * n_days:
            report = replace(report, warnings=report.warnings + (
                f"hour {hour:02d}: {missing} of {n_days} days missing",))
        reports.append(report)
    return reports
