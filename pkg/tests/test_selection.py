"""Per-hour model selection: grid fits, BIC argmin, diagnostics, isolation."""

import numpy as np
import pytest

from solararma import (
    FailedHour,
    FitReport,
    GridCell,
    NightMask,
    OrderGrid,
    SelectionError,
    _jsonfmt,
    detect_night_hours,
    fit_all_hours,
    grid_search,
    select_model,
    slice_by_hour,
)
from solararma.diagnostics import LjungBoxResult, chi2_quantile, ljung_box
from solararma.synthetic import arma_sample, diurnal_series
from solararma import ArmaModel
from conftest import full_day_series


def test_order_grid_square_and_cells():
    grid = OrderGrid.square(4)
    assert (grid.p_min, grid.p_max, grid.q_min, grid.q_max) == (1, 4, 1, 4)
    assert len(grid.cells) == 16
    assert grid.cells[0] == (1, 1)
    assert grid.cells[1] == (1, 2)       # q varies fastest
    assert grid.cells[-1] == (4, 4)
    assert grid.max_order == 4


def test_order_grid_validation():
    with pytest.raises(ValueError):
        OrderGrid(2, 1, 1, 1)
    with pytest.raises(ValueError):
        OrderGrid(-1, 1, 1, 1)
    back = OrderGrid.from_dict(OrderGrid(1, 2, 1, 3).to_dict())
    assert back == OrderGrid(1, 2, 1, 3)


def test_grid_search_minimizes_bic():
    x = arma_sample([0.6], [], 50.0, 4.0, 400, seed=10)
    cells, chosen, model, resid = grid_search(x, OrderGrid.square(2), seed=3)
    assert len(cells) == 4
    ok = [c for c in cells if c.ok]
    assert ok, "no successful fits"
    best_bic = min(c.bic for c in ok)
    chosen_cell = next(c for c in cells if (c.p, c.q) == chosen)
    assert chosen_cell.bic == best_bic
    assert (model.p, model.q) == chosen
    assert resid.shape == x.shape


def test_grid_search_deterministic():
    x = arma_sample([0.5], [0.2], 10.0, 1.0, 300, seed=4)
    _, chosen1, m1, _ = grid_search(x, OrderGrid.square(2), seed=5, tag=9)
    _, chosen2, m2, _ = grid_search(x, OrderGrid.square(2), seed=5, tag=9)
    assert chosen1 == chosen2
    assert m1.phi.tolist() == m2.phi.tolist()
    assert m1.loglik == m2.loglik


def test_grid_search_all_fail():
    with pytest.raises(SelectionError):
        grid_search(np.full(100, 3.25), OrderGrid.square(2))


def test_select_model_report_contents(diurnal_90):
    sl = slice_by_hour(diurnal_90, 12)
    rep = select_model(sl, OrderGrid.square(2), seed=1)
    assert rep.hour == 12
    assert rep.n_train == 90
    assert rep.adf is not None
    assert len(rep.grid) == 4
    assert rep.chosen == (rep.model.p, rep.model.q)
    assert len(rep.value_tail) == rep.model.p
    assert len(rep.residual_tail) == rep.model.q
    assert [lb.lag for lb in rep.ljung_box] == [5, 10, 15]
    for lb in rep.ljung_box:
        assert lb.dof == lb.lag - (rep.model.p + rep.model.q)
    # conditioning tail is literally the end of the training values
    assert list(rep.value_tail) == sl.values[len(sl) - rep.model.p:].tolist()


def test_select_model_deterministic(diurnal_90):
    sl = slice_by_hour(diurnal_90, 9)
    a = select_model(sl, OrderGrid.square(2), seed=2)
    b = select_model(sl, OrderGrid.square(2), seed=2)
    assert a.to_dict() == b.to_dict()


def test_select_model_flags_unit_root():
    rng = np.random.default_rng(8)
    walk = np.cumsum(rng.normal(size=120)) + 500.0
    sl = slice_by_hour(full_day_series([[v] * 24 for v in walk]), 12)
    rep = select_model(sl, OrderGrid.square(1), seed=0)
    assert rep.adf is not None
    assert not rep.adf.reject_unit_root
    assert any("unit root" in w for w in rep.warnings)


def test_select_model_short_series_skips_adf():
    x = arma_sample([0.5], [], 20.0, 1.0, 25, seed=6)
    sl = slice_by_hour(full_day_series([[v] * 24 for v in x]), 3)
    rep = select_model(sl, OrderGrid.square(1), seed=0)
    assert rep.adf is None
    assert any("ADF test skipped" in w for w in rep.warnings)
    assert rep.chosen == (1, 1)


def test_select_model_skips_degenerate_lb_lag():
    # p + q = 5 leaves no degrees of freedom at lag 5
    x = arma_sample([0.6, -0.2, 0.1], [0.3, 0.1], 0.0, 1.0, 400, seed=7)
    sl = slice_by_hour(full_day_series([[abs(v)] * 24 for v in x]), 0)
    rep = select_model(sl, OrderGrid(3, 3, 2, 2), seed=0)
    assert rep.chosen == (3, 2)
    assert [lb.lag for lb in rep.ljung_box] == [10, 15]
    assert any("lag 5 skipped" in w for w in rep.warnings)


def test_select_model_empty_slice():
    sl = slice_by_hour(full_day_series([[None] * 24]), 12)
    with pytest.raises(SelectionError, match="no observations"):
        select_model(sl, OrderGrid.square(1))


def test_fit_all_hours_night_mask(diurnal_90):
    mask = detect_night_hours(diurnal_90)
    reports = fit_all_hours(diurnal_90, mask, OrderGrid.square(1), seed=3)
    assert len(reports) == 14
    assert [r.hour for r in reports] == list(range(6, 20))
    assert all(isinstance(r, FitReport) for r in reports)


def test_fit_all_hours_empty_mask():
    rng = np.random.default_rng(12)
    days = [(rng.uniform(50, 60, size=24)).tolist() for _ in range(40)]
    s = full_day_series(days)
    reports = fit_all_hours(s, NightMask(frozenset()), OrderGrid.square(1), seed=0)
    assert len(reports) == 24
    assert [r.hour for r in reports] == list(range(24))


def test_fit_all_hours_isolates_failures():
    rng = np.random.default_rng(13)
    days = []
    for _ in range(40):
        day = [0.0] * 24
        for h in range(6, 20):
            day[h] = float(rng.uniform(100, 200))
        day[12] = 500.0               # constant: hour 12 cannot be fit
        days.append(day)
    s = full_day_series(days)
    mask = NightMask(frozenset(range(0, 6)) | frozenset(range(20, 24)))
    reports = fit_all_hours(s, mask, OrderGrid.square(1), seed=1)
    assert len(reports) == 14
    by_hour = {r.hour: r for r in reports}
    assert isinstance(by_hour[12], FailedHour)
    assert "hour 12" in by_hour[12].error
    assert all(isinstance(by_hour[h], FitReport) for h in range(6, 20) if h != 12)


def test_fit_all_hours_missing_days_warning():
    base = diurnal_series(60, seed=5)
    power = base.power.copy()
    hours = base.hour_of_day
    noon = np.flatnonzero(hours == 12)
    power[noon[:6]] = np.nan          # 10% of noon observations gone
    from solararma import SolarSeries
    s = SolarSeries(base.timestamps, power)
    mask = detect_night_hours(s)
    reports = fit_all_hours(s, mask, OrderGrid.square(1), seed=0)
    by_hour = {r.hour: r for r in reports}
    assert any("days missing" in w for w in by_hour[12].warnings)
    assert not any("days missing" in w for w in by_hour[13].warnings)


def test_fit_report_json_round_trip(diurnal_90):
    rep = select_model(slice_by_hour(diurnal_90, 15), OrderGrid.square(2), seed=4)
    text = _jsonfmt.dumps(rep.to_dict())
    back = FitReport.from_dict(_jsonfmt.loads(text))
    assert back.to_dict() == rep.to_dict()


def _tiny_report(**overrides):
    """A minimal structurally-valid FitReport for invariant probing."""
    model = ArmaModel(1, 0, [0.5], [], 10.0, 1.0, -50.0, 40)
    resid = arma_sample([0.5], [], 0.0, 1.0, 40, seed=0)
    lb = ljung_box(resid, 5, fitted_params=1)
    fields = dict(
        hour=8,
        n_train=40,
        adf=None,
        grid=(GridCell(1, 0, -50.0, 107.38, True),),
        chosen=(1, 0),
        model=model,
        ljung_box=(lb,),
        value_tail=(9.5,),
        residual_tail=(),
        warnings=(),
    )
    fields.update(overrides)
    return FitReport(**fields)


def test_fit_report_invariants():
    _tiny_report()                     # valid baseline must construct
    with pytest.raises(ValueError, match="chosen"):
        _tiny_report(chosen=(2, 0))
    with pytest.raises(ValueError, match="tail"):
        _tiny_report(value_tail=())
    with pytest.raises(ValueError, match="BIC"):
        _tiny_report(grid=(GridCell(1, 0, -50.0, 107.38, True),
                           GridCell(1, 1, -49.0, 100.0, True)))
    bad_lb = LjungBoxResult(5, 1.0, 3, chi2_quantile(0.95, 3), False)
    with pytest.raises(ValueError, match="dof"):
        _tiny_report(ljung_box=(bad_lb,))


def test_white_noise_prefers_minimal_order():
    """BIC parsimony: white noise selects the smallest order in the grid."""
    wins = 0
    clean = 0
    n_rep = 5
    for rep_seed in range(n_rep):
        x = arma_sample([], [], 100.0, 25.0, 300, seed=1000 + rep_seed)
        sl = slice_by_hour(full_day_series([[abs(v)] * 24 for v in x]), 6)
        rep = select_model(sl, OrderGrid.square(2), seed=rep_seed)
        if rep.chosen == (1, 1):
            wins += 1
        if all(not lb.reject_white for lb in rep.ljung_box):
            clean += 1
    assert wins >= 3, f"(1,1) chosen only {wins}/{n_rep} times"
    assert clean >= 3, f"residual whiteness rejected too often ({clean}/{n_rep} clean)"
