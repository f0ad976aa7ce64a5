"""Hour-by-hour ARMA modelling of solar power series.

The package splits an hourly photovoltaic power record into one subsequence
per daylight hour, fits an ARMA model to each by exact maximum likelihood
with BIC order selection, and uses the per-hour models for day-ahead
prediction and Monte Carlo scenario generation. See README.md for the
pipeline walk-through and the `solar-arma` command-line entry point.
"""

from .arma import (ArmaModel, conditional_residuals, fit, forecast_one_step,
                   log_likelihood, simulate)
from .diagnostics import (AdfResult, LjungBoxResult, adf_test, bic,
                          chi2_quantile, ljung_box, sample_autocorrelation)
from .errors import (DataFormatError, FitError, MissingModelError,
                     SelectionError, SolarArmaError)
from .evaluation import (ComparisonTable, MetricReport, compare_models,
                         fit_single_arma, mae, metric_report, rmse,
                         smart_persistence)
from .scenarios import (QuantileBands, ScenarioSet, generate_scenarios,
                        negative_rate_report, quantile_bands,
                        write_quantiles_csv, write_scenarios_csv)
from .selection import (FailedHour, FitReport, GridCell, OrderGrid,
                        fit_all_hours, grid_search, select_model)
from .series import (HourSlice, NightMask, SolarSeries, detect_night_hours,
                     dump_series, load_series, slice_by_hour, split_at_date,
                     split_by_days)

__version__ = "0.1.0"

__all__ = [
    "ArmaModel", "conditional_residuals", "fit", "forecast_one_step",
    "log_likelihood", "simulate",
    "AdfResult", "LjungBoxResult", "adf_test", "bic", "chi2_quantile",
    "ljung_box", "sample_autocorrelation",
    "DataFormatError", "FitError", "MissingModelError", "SelectionError",
    "SolarArmaError",
    "ComparisonTable", "MetricReport", "compare_models", "fit_single_arma",
    "mae", "metric_report", "rmse", "smart_persistence",
    "QuantileBands", "ScenarioSet", "generate_scenarios",
    "negative_rate_report", "quantile_bands", "write_quantiles_csv",
    "write_scenarios_csv",
    "FailedHour", "FitReport", "GridCell", "OrderGrid", "fit_all_hours",
    "grid_search", "select_model",
    "HourSlice", "NightMask", "SolarSeries", "detect_night_hours",
    "dump_series", "load_series", "slice_by_hour", "split_at_date",
    "split_by_days",
    "__version__",
]
