"""Synthetic data generators used throughout the test suite."""

import numpy as np

from solararma import detect_night_hours, synthetic


def test_bell_profile_shape():
    prof = synthetic.bell_profile(peak_mw=1000.0)
    assert prof.shape == (24,)
    assert prof[:6].tolist() == [0.0] * 6
    assert prof[20:].tolist() == [0.0] * 4
    assert prof.max() <= 1000.0 + 1e-9
    # peak sits mid-window and the profile rises then falls
    assert prof.argmax() in (12, 13)
    assert prof[6] < prof[10] < prof[12]
    assert prof[13] > prof[16] > prof[19]


def test_diurnal_series_structure():
    s = synthetic.diurnal_series(10, seed=1)
    assert s.n_days == 10
    assert len(s) == 240
    assert np.all(s.power >= 0)
    hours = s.hour_of_day
    for h in synthetic.NIGHT_HOURS:
        assert np.all(s.power[hours == h] == 0.0)
    for h in synthetic.DAYLIGHT_HOURS:
        assert np.all(s.power[hours == h] > 0.0)


def test_diurnal_series_night_mask_detected():
    s = synthetic.diurnal_series(15, seed=2)
    mask = detect_night_hours(s)
    assert mask.zero_hours == frozenset(synthetic.NIGHT_HOURS)


def test_diurnal_series_seeded():
    a = synthetic.diurnal_series(8, seed=5)
    b = synthetic.diurnal_series(8, seed=5)
    c = synthetic.diurnal_series(8, seed=6)
    assert np.array_equal(a.power, b.power)
    assert not np.array_equal(a.power, c.power)


def test_arma_sample_deterministic_and_sized():
    x = synthetic.arma_sample([0.6], [], 2.0, 1.0, 500, seed=3)
    y = synthetic.arma_sample([0.6], [], 2.0, 1.0, 500, seed=3)
    assert x.shape == (500,)
    assert np.array_equal(x, y)
    # mean close to the intercept for a stationary sample of this size
    assert abs(x.mean() - 2.0) < 0.5


def test_arma_sample_zero_variance():
    x = synthetic.arma_sample([0.5], [0.2], 3.0, 0.0, 50, seed=0)
    assert np.allclose(x, 3.0)
