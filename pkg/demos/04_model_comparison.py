#!/usr/bin/env python3
"""Hourly ARMA vs one whole-series ARMA vs smart persistence.

All three are scored on the same test points. The whole-series model has to
explain the day-night cycle with a single stationary process, which it
cannot; smart persistence (mean of the two previous observations) lags every
ramp. The hour-by-hour models sidestep both problems.
"""

from solararma import detect_night_hours
from solararma.evaluation import compare_models
from solararma.selection import OrderGrid
from solararma.synthetic import diurnal_series

series = diurnal_series(60, seed=17)
mask = detect_night_hours(series)

table = compare_models(series, mask, OrderGrid.square(2), seed=0)
print(table.to_text())

h = table.metrics["hourly_arma"]
s = table.metrics["single_arma"]
p = table.metrics["smart_persistence"]
print(f"\nhourly model MAE is {h.mae / p.mae:.2f}x smart persistence "
      f"and {h.mae / s.mae:.2f}x the single whole-series ARMA")
print("the gap versus persistence is the headline: day-ahead horizons are")
print("exactly where persistence-style baselines fall apart.")
