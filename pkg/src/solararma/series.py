"""Hourly solar power series: ingestion, validation and per-hour slicing.

Input format
------------
CSV with header ``date,hour,power_mw``. ``date`` is an ISO-8601 calendar
date, ``hour`` an integer 0-23 and ``power_mw`` a non-negative decimal in
megawatts. Consecutive rows must be exactly one hour apart; a gap in the
record is declared explicitly by a row whose power field is empty. Rows out
of order, duplicated timestamps or silent jumps are rejected.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import DataFormatError

CSV_HEADER = ("date", "hour", "power_mw")

_HOUR = np.timedelta64(1, "h")


@dataclass(frozen=True)
class SolarSeries:
    """Contiguous hourly power record.

    ``timestamps`` has dtype ``datetime64[h]`` and strictly increasing hourly
    spacing. ``power`` holds megawatts; a NaN entry marks an explicitly
    declared gap (no observation at that hour). Both arrays are read-only.
    """

    timestamps: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype="datetime64[h]")
        pw = np.asarray(self.power, dtype=float)
        if ts.shape != pw.shape or ts.ndim != 1:
            raise DataFormatError("timestamps and power must be 1-d arrays of equal length")
        if ts.size == 0:
            raise DataFormatError("series is empty")
        if ts.size > 1:
            steps = np.diff(ts)
            if np.any(steps != _HOUR):
                raise DataFormatError("timestamps must be strictly increasing with hourly spacing")
        observed = ~np.isnan(pw)
        if np.any(pw[observed] < 0):
            raise DataFormatError("negative power value in series")
        ts.setflags(write=False)
        pw.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "power", pw)

    def __len__(self) -> int:
        return int(self.timestamps.size)

    @property
    def hour_of_day(self) -> np.ndarray:
        """Hour of day (0-23) for every row."""
        return self.timestamps.astype("int64") % 24

    @property
    def day_index(self) -> np.ndarray:
        """1-based calendar-day ordinal of every row, counted from the first day."""
        days = self.timestamps.astype("datetime64[D]")
        return (days - days[0]).astype("int64") + 1

    @property
    def n_days(self) -> int:
        """Number of calendar days spanned by the series."""
        return int(self.day_index[-1])

    @property
    def n_observed(self) -> int:
        """Number of rows carrying an actual observation (gaps excluded)."""
        return int(np.count_nonzero(~np.isnan(self.power)))

    def records(self) -> Iterator[tuple[np.datetime64, float]]:
        """Iterate over (timestamp, power) for observed rows, in order."""
        for ts, pw in zip(self.timestamps, self.power):
            if not np.isnan(pw):
                yield ts, float(pw)


@dataclass(frozen=True)
class HourSlice:
    """All observations of one hour of day, in chronological (day) order."""

    hour: int
    values: np.ndarray
    day_index: np.ndarray

    def __post_init__(self):
        if not 0 <= self.hour <= 23:
            raise ValueError(f"hour must be in 0..23, got {self.hour}")
        vals = np.asarray(self.values, dtype=float)
        days = np.asarray(self.day_index, dtype="int64")
        if vals.shape != days.shape or vals.ndim != 1:
            raise ValueError("values and day_index must be 1-d arrays of equal length")
        vals.setflags(write=False)
        days.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "day_index", days)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class NightMask:
    """Partition of the 24 hours into structurally-zero and modelled hours."""

    zero_hours: frozenset

    def __post_init__(self):
        zh = frozenset(int(h) for h in self.zero_hours)
        if not all(0 <= h <= 23 for h in zh):
            raise ValueError("zero_hours entries must be in 0..23")
        object.__setattr__(self, "zero_hours", zh)

    @property
    def modeled_hours(self) -> tuple:
        return tuple(h for h in range(24) if h not in self.zero_hours)


def _parse_row(row: Sequence[str], lineno: int):
    if len(row) != 3:
        raise DataFormatError(f"line {lineno}: expected 3 fields, got {len(row)}")
    date_s, hour_s, power_s = (field.strip() for field in row)
    try:
        date = _dt.date.fromisoformat(date_s)
    except ValueError as exc:
        raise DataFormatError(f"line {lineno}: bad date {date_s!r}") from exc
    try:
        hour = int(hour_s)
    except ValueError as exc:
        raise DataFormatError(f"line {lineno}: bad hour {hour_s!r}") from exc
    if not 0 <= hour <= 23:
        raise DataFormatError(f"line {lineno}: hour {hour} out of range 0..23")
    if power_s == "":
        power = np.nan
    else:
        try:
            power = float(power_s)
        except ValueError as exc:
            raise DataFormatError(f"line {lineno}: bad power {power_s!r}") from exc
        if not np.isfinite(power):
            raise DataFormatError(f"line {lineno}: power must be finite")
        if power < 0:
            raise DataFormatError(f"line {lineno}: negative power {power}")
    ts = np.datetime64(date.isoformat(), "h") + np.timedelta64(hour, "h")
    return ts, power


def load_series(source) -> SolarSeries:
    """Load and validate a :class:`SolarSeries` from the documented CSV format.

    Parameters
    ----------
    source : path-like or text file object
        CSV input with header ``date,hour,power_mw``.

    Raises
    ------
    DataFormatError
        Malformed rows, negative power, rows out of order, duplicate
        timestamps, or non-hourly spacing without an explicit gap row.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", newline="") as fh:
            return load_series(fh)
    if isinstance(source, (bytes, bytearray)):
        return load_series(io.StringIO(source.decode("utf-8")))

    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise DataFormatError("empty input") from None
    if tuple(field.strip() for field in header) != CSV_HEADER:
        raise DataFormatError(f"expected header {','.join(CSV_HEADER)!r}, got {header!r}")

    timestamps: list[np.datetime64] = []
    power: list[float] = []
    prev_ts = None
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        ts, pw = _parse_row(row, lineno)
        if prev_ts is not None:
            if ts <= prev_ts:
                raise DataFormatError(f"line {lineno}: rows out of chronological order")
            if ts - prev_ts != _HOUR:
                raise DataFormatError(
                    f"line {lineno}: non-hourly spacing; declare missing hours "
                    "with explicit gap rows (empty power field)"
                )
        prev_ts = ts
        timestamps.append(ts)
        power.append(pw)
    if not timestamps:
        raise DataFormatError("no data rows in input")
    return SolarSeries(np.array(timestamps, dtype="datetime64[h]"), np.array(power))


def dump_series(series: SolarSeries, dest) -> None:
    """Write ``series`` back to the documented CSV format (gaps as empty power)."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            dump_series(series, fh)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    hours = series.hour_of_day
    for i, ts in enumerate(series.timestamps):
        date_s = str(ts.astype("datetime64[D]"))
        pw = series.power[i]
        writer.writerow([date_s, int(hours[i]), "" if np.isnan(pw) else repr(float(pw))])


def detect_night_hours(series: SolarSeries, threshold: float = 0.0) -> NightMask:
    """Classify hours whose every observation lies at or below ``threshold`` MW.

    Hours with no observation at all are classified as zero hours (there is
    nothing to model). With threshold 0 on data whose night hours are exact
    zeros this reproduces the fixed night window.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    hours = series.hour_of_day
    observed = ~np.isnan(series.power)
    zero = []
    for h in range(24):
        vals = series.power[(hours == h) & observed]
        if vals.size == 0 or np.all(vals <= threshold):
            zero.append(h)
    return NightMask(frozenset(zero))


def slice_by_hour(series: SolarSeries, hour: int) -> HourSlice:
    """Chronological subsequence of observations at one hour of day.

    Days with a declared gap at that hour are omitted; their absence is
    visible through ``day_index``.
    """
    if not 0 <= hour <= 23:
        raise ValueError(f"hour must be in 0..23, got {hour}")
    sel = (series.hour_of_day == hour) & ~np.isnan(series.power)
    return HourSlice(hour, series.power[sel], series.day_index[sel])


def split_by_days(series: SolarSeries, test_fraction: float) -> tuple:
    """Split into (train, test) on a calendar-day boundary.

    The last ``round(test_fraction * n_days)`` days (at least one) form the
    test window.
    """
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be in (0, 1)")
    n_days = series.n_days
    n_test = max(1, int(round(test_fraction * n_days)))
    if n_test >= n_days:
        raise ValueError(f"test fraction {test_fraction} leaves no training days")
    cut = n_days - n_test
    day_idx = series.day_index
    train_sel = day_idx <= cut
    test_sel = ~train_sel
    return (
        SolarSeries(series.timestamps[train_sel], series.power[train_sel]),
        SolarSeries(series.timestamps[test_sel], series.power[test_sel]),
    )


def split_at_date(series: SolarSeries, last_train_date) -> tuple:
    """Split into (train, test) with ``last_train_date`` as the final training day."""
    if isinstance(last_train_date, str):
        last_train_date = _dt.date.fromisoformat(last_train_date)
    boundary = np.datetime64(last_train_date.isoformat(), "D")
    days = series.timestamps.astype("datetime64[D]")
    train_sel = days <= boundary
    test_sel = ~train_sel
    if not train_sel.any():
        raise ValueError(f"no training data on or before {last_train_date}")
    if not test_sel.any():
        raise ValueError(f"no test data after {last_train_date}")
    return (
        SolarSeries(series.timestamps[train_sel], series.power[train_sel]),
        SolarSeries(series.timestamps[test_sel], series.power[test_sel]),
    )
