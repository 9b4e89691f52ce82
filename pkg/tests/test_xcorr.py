from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import ccf_direct, normal_quantile, score_direct
from survcorr.errors import DegenerateSeriesError, DomainError, LengthError, PairingError
from survcorr.timeseries import TimeSeries
from survcorr.xcorr import (
    CorrelationVector,
    ccf,
    lag_weights,
    significance_threshold,
    weighted_score,
)

# frozen from the mpmath quantile oracle: sqrt(2) * erfinv(0.95)
Z_975 = 1.9599639845400538
THRESHOLD_207 = 0.1362269139364463


def test_self_correlation_at_lag_zero():
    rng = np.random.default_rng(3)
    x = rng.poisson(12, 60).astype(float)
    cv = ccf(x, x)
    assert cv.at(0) == pytest.approx(1.0, abs=1e-15)
    assert cv.values.shape == (11,)


def test_delayed_copy_peaks_at_plus_two():
    rng = np.random.default_rng(11)
    x = rng.normal(size=207)
    y = np.concatenate([rng.normal(size=2), x[:-2]])
    oracle = ccf_direct(list(x), list(y), 5)
    assert int(np.argmax(oracle)) - 5 == 2
    cv = ccf(x, y)
    assert cv.peak_lag() == 2
    np.testing.assert_allclose(cv.values, oracle, atol=1e-12, rtol=0)


def test_matches_direct_oracle_on_series_objects():
    rng = np.random.default_rng(5)
    x = TimeSeries(4, 1, rng.poisson(30, 120))
    y = TimeSeries(9, 1, rng.poisson(20, 120))
    cv = ccf(x, y, 7)
    assert (cv.i, cv.j, cv.n, cv.lag_max) == (4, 9, 120, 7)
    np.testing.assert_allclose(cv.values, ccf_direct(list(x.values), list(y.values), 7),
                               atol=1e-12, rtol=0)


def test_ccf_errors():
    with pytest.raises(PairingError):
        ccf(np.arange(20.0), np.arange(21.0))
    with pytest.raises(DegenerateSeriesError):
        ccf(np.ones(20), np.arange(20.0))
    with pytest.raises(LengthError):
        ccf(np.arange(11.0), np.arange(11.0)[::-1])


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
series_pair = st.integers(12, 80).flatmap(
    lambda n: st.tuples(arrays(np.float64, n, elements=finite), arrays(np.float64, n, elements=finite))
).filter(lambda p: np.ptp(p[0]) > 1e-3 and np.ptp(p[1]) > 1e-3)


@settings(max_examples=200)
@given(series_pair)
def test_reversal_symmetry_is_exact(pair):
    x, y = pair
    assert np.array_equal(ccf(x, y).values, ccf(y, x).values[::-1])


@settings(max_examples=200)
@given(series_pair)
def test_correlations_bounded(pair):
    values = ccf(*pair).values
    assert (np.abs(values) <= 1.0 + 1e-12).all()


@settings(max_examples=100)
@given(series_pair, st.floats(0.01, 100), st.floats(-500, 500), st.floats(0.01, 100), st.floats(-500, 500))
def test_affine_invariance(pair, a, b, c, d):
    x, y = pair
    base = ccf(x, y)
    moved = ccf(a * x + b, c * y + d)
    np.testing.assert_allclose(moved.values, base.values, atol=1e-9, rtol=0)


def test_affine_invariance_tight_on_counts():
    rng = np.random.default_rng(8)
    x, y = rng.poisson(25, (2, 207)).astype(float)
    np.testing.assert_allclose(ccf(3 * x + 7, 0.5 * y + 2).values, ccf(x, y).values,
                               atol=1e-12, rtol=0)
    assert weighted_score(ccf(3 * x + 7, y)) == pytest.approx(weighted_score(ccf(x, y)), abs=1e-12)


def test_weights():
    w = lag_weights(5)
    assert w[5] == 10.0
    assert np.array_equal(w, w[::-1])
    assert (np.diff(w[5:]) < 0).all()
    np.testing.assert_allclose(w, [10 / (abs(k) + 1) for k in range(-5, 6)], rtol=0, atol=0)


def test_weighted_score_analytic_cases():
    assert weighted_score(np.zeros(11)) == 0.0
    e0 = np.zeros(11)
    e0[5] = 1.0
    assert weighted_score(e0) == 10.0
    assert weighted_score(np.ones(11)) == 39.0
    assert weighted_score(CorrelationVector(5, np.ones(11), 100)) == 39.0


@given(arrays(np.float64, 11, elements=st.floats(-1, 1)), st.floats(-10, 10), st.integers(-8, 8))
def test_weighted_score_linear_and_matches_direct(values, alpha, power):
    s = weighted_score(values)
    assert s == pytest.approx(score_direct(values), abs=1e-12)
    assert abs(s) <= 39.0
    # power-of-two scaling is exact in floating point
    assert weighted_score(2.0**power * values) == 2.0**power * s
    # otherwise the gap is bounded by rounding of the 11-term sum
    magnitude = abs(alpha) * float((lag_weights(5) * np.abs(values)).sum())
    assert abs(weighted_score(alpha * values) - alpha * s) <= 1e-15 * max(magnitude, 1.0) * 4


def test_significance_threshold():
    assert significance_threshold(100) == pytest.approx(Z_975 / 10, abs=1e-12)
    assert significance_threshold(100) == pytest.approx(0.196, abs=1e-4)
    assert significance_threshold(384.16) == pytest.approx(0.1000, abs=1e-4)
    assert significance_threshold(207) == pytest.approx(THRESHOLD_207, abs=1e-12)
    assert significance_threshold(207) == pytest.approx(0.13624, abs=1e-4)


@pytest.mark.parametrize("alpha", [0.001, 0.01, 0.05, 0.1, 0.3, 0.9])
def test_threshold_quantile_matches_high_precision(alpha):
    expected = normal_quantile(1 - alpha / 2) / np.sqrt(50)
    assert significance_threshold(50, alpha) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
def test_threshold_domain(alpha):
    with pytest.raises(DomainError):
        significance_threshold(50, alpha)
