"""Shared fixtures: synthetic series and CSV scaffolding."""

import io

import numpy as np
import pytest

from solararma import SolarSeries, load_series
from solararma import synthetic


def series_from_rows(rows):
    """Build a SolarSeries from (iso_date, hour, power) tuples via the CSV loader."""
    lines = ["date,hour,power_mw"]
    for date, hour, power in rows:
        lines.append(f"{date},{hour},{'' if power is None else power}")
    return load_series(io.StringIO("\n".join(lines) + "\n"))


def full_day_series(day_values, start="2021-03-01"):
    """SolarSeries covering len(day_values) full days; day_values is a list of
    24-vectors (None entries become declared gaps)."""
    start_ts = np.datetime64(start, "h")
    ts, pw = [], []
    for d, day in enumerate(day_values):
        for h in range(24):
            ts.append(start_ts + np.timedelta64(24 * d + h, "h"))
            v = day[h]
            pw.append(np.nan if v is None else float(v))
    return SolarSeries(np.array(ts, dtype="datetime64[h]"), np.array(pw))


@pytest.fixture(scope="session")
def diurnal_90():
    """90 days of synthetic diurnal data, fixed seed. Night hours 20-05 are zero."""
    return synthetic.diurnal_series(90, seed=7)


@pytest.fixture(scope="session")
def diurnal_csv(tmp_path_factory, diurnal_90):
    """The same 90-day series written to disk in the documented CSV format."""
    from solararma import dump_series

    path = tmp_path_factory.mktemp("data") / "diurnal90.csv"
    dump_series(diurnal_90, path)
    return path
