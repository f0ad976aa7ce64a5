"""CSV ingestion, night detection, hourly slicing and day splits."""

import io

import numpy as np
import pytest

from solararma import (
    DataFormatError,
    NightMask,
    SolarSeries,
    detect_night_hours,
    dump_series,
    load_series,
    slice_by_hour,
    split_at_date,
    split_by_days,
)
from conftest import full_day_series, series_from_rows


def test_load_two_rows():
    s = series_from_rows([("2020-01-01", 6, 10.0), ("2020-01-01", 7, 20.0)])
    assert len(s) == 2
    assert s.power.tolist() == [10.0, 20.0]
    assert s.hour_of_day.tolist() == [6, 7]


def test_load_rejects_out_of_order():
    with pytest.raises(DataFormatError, match="order"):
        series_from_rows([("2020-01-01", 7, 20.0), ("2020-01-01", 6, 10.0)])


def test_load_rejects_negative_power():
    with pytest.raises(DataFormatError, match="negative"):
        series_from_rows([("2020-01-01", 6, -1.0)])


def test_load_rejects_duplicate_timestamp():
    with pytest.raises(DataFormatError):
        series_from_rows([("2020-01-01", 6, 1.0), ("2020-01-01", 6, 2.0)])


def test_load_rejects_silent_jump():
    # skipping an hour without a gap row is a schema violation
    with pytest.raises(DataFormatError, match="gap"):
        series_from_rows([("2020-01-01", 6, 1.0), ("2020-01-01", 8, 2.0)])


def test_load_accepts_declared_gap():
    s = series_from_rows([("2020-01-01", 6, 1.0), ("2020-01-01", 7, None),
                          ("2020-01-01", 8, 2.0)])
    assert len(s) == 3
    assert np.isnan(s.power[1])
    assert s.n_observed == 2


def test_load_error_names_line_number():
    with pytest.raises(DataFormatError, match="line 3"):
        series_from_rows([("2020-01-01", 6, 1.0), ("2020-01-01", 24, 2.0)])


def test_load_rejects_bad_header():
    with pytest.raises(DataFormatError, match="header"):
        load_series(io.StringIO("day,hour,mw\n2020-01-01,6,1.0\n"))


def test_round_trip_identical_records():
    s = full_day_series([[0] * 6 + [1.0 * h for h in range(6, 20)] + [0] * 4,
                         [0] * 6 + [2.0 * h for h in range(6, 20)] + [0] * 4])
    buf = io.StringIO()
    dump_series(s, buf)
    s2 = load_series(io.StringIO(buf.getvalue()))
    assert np.array_equal(s.timestamps, s2.timestamps)
    assert np.array_equal(s.power, s2.power, equal_nan=True)


def test_round_trip_preserves_gaps(tmp_path):
    day = [0.0] * 24
    day[12] = None
    s = full_day_series([day])
    path = tmp_path / "gap.csv"
    dump_series(s, path)
    s2 = load_series(path)
    assert np.isnan(s2.power[12])
    assert s2.n_observed == 23


def test_detect_night_hours_ten_hour_night():
    """Zeros at 20-23 and 0-5 with positive daylight gives the 10-hour mask."""
    day = [0.0] * 24
    for h in range(6, 20):
        day[h] = 5.0 + h
    mask = detect_night_hours(full_day_series([day, day]))
    assert mask.zero_hours == frozenset([20, 21, 22, 23, 0, 1, 2, 3, 4, 5])
    assert len(mask.modeled_hours) == 14


def test_detect_night_hours_all_positive():
    day = [1.0 + h for h in range(24)]
    mask = detect_night_hours(full_day_series([day]))
    assert mask.zero_hours == frozenset()
    assert mask.modeled_hours == tuple(range(24))


def test_detect_night_hours_threshold():
    # hour 19 peaks at 0.5 MW; threshold 1.0 classifies it as night
    day = [0.0] * 24
    for h in range(6, 19):
        day[h] = 10.0
    day[19] = 0.5
    mask = detect_night_hours(full_day_series([day]), threshold=1.0)
    assert 19 in mask.zero_hours
    assert 12 not in mask.zero_hours


def test_slice_by_hour_selects_noon():
    days = []
    for d in range(3):
        day = [0.0] * 24
        day[12] = 100.0 + d
        days.append(day)
    sl = slice_by_hour(full_day_series(days), 12)
    assert len(sl) == 3
    assert sl.values.tolist() == [100.0, 101.0, 102.0]
    assert sl.day_index.tolist() == [1, 2, 3]


def test_slice_by_hour_omits_gap_days():
    day1 = [0.0] * 24
    day1[12] = 7.0
    day2 = [0.0] * 24
    day2[12] = None
    day3 = [0.0] * 24
    day3[12] = 9.0
    sl = slice_by_hour(full_day_series([day1, day2, day3]), 12)
    assert len(sl) == 2
    assert sl.day_index.tolist() == [1, 3]


def test_hour_slices_partition_records(diurnal_90):
    total = sum(len(slice_by_hour(diurnal_90, h)) for h in range(24))
    assert total == diurnal_90.n_observed
    pooled = np.sort(np.concatenate(
        [slice_by_hour(diurnal_90, h).values for h in range(24)]))
    observed = np.sort(diurnal_90.power[~np.isnan(diurnal_90.power)])
    assert np.array_equal(pooled, observed)


def test_split_by_days_boundary(diurnal_90):
    train, test = split_by_days(diurnal_90, 0.2)
    assert train.n_days == 72
    assert test.n_days == 18
    assert train.timestamps[-1] + np.timedelta64(1, "h") == test.timestamps[0]


def test_split_by_days_keeps_at_least_one_test_day():
    day = [1.0] * 24
    train, test = split_by_days(full_day_series([day, day, day]), 0.01)
    assert test.n_days == 1


def test_split_by_days_rejects_degenerate_fraction():
    day = [1.0] * 24
    with pytest.raises(ValueError):
        split_by_days(full_day_series([day, day]), 0.9)


def test_split_at_date():
    day = [1.0] * 24
    s = full_day_series([day, day, day], start="2021-03-01")
    train, test = split_at_date(s, "2021-03-02")
    assert train.n_days == 2
    assert test.n_days == 1
    with pytest.raises(ValueError):
        split_at_date(s, "2021-03-03")
    with pytest.raises(ValueError):
        split_at_date(s, "2021-02-27")


def test_series_validation():
    ts = np.arange(np.datetime64("2020-01-01", "h"),
                   np.datetime64("2020-01-01", "h") + np.timedelta64(3, "h"))
    with pytest.raises(DataFormatError):
        SolarSeries(ts, np.array([1.0, -2.0, 3.0]))
    with pytest.raises(DataFormatError):
        SolarSeries(ts[::-1].copy(), np.array([1.0, 2.0, 3.0]))


def test_night_mask_modeled_hours_complement():
    mask = NightMask(frozenset({0, 1, 23}))
    assert set(mask.modeled_hours) | mask.zero_hours == set(range(24))
    assert set(mask.modeled_hours) & mask.zero_hours == set()
