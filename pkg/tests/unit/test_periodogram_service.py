"""
Unit Tests for the periodogram service
"""

import math

import numpy as np
import pytest

from wavespec.exceptions import InvalidArgumentError, WavespecWarning
from wavespec.schemas import TimeSeries
from wavespec.services.periodogram_service import bias_constant, default_grid_exponent, periodogram
from wavespec.services.process_service import simulate


@pytest.mark.unit
class TestPeriodogram:

    @pytest.fixture
    def series(self, two_peak_model):
        return simulate(two_peak_model, 1000, seed=5)

    def test_symmetric_about_one_half(self, series):
        values = periodogram(series, 10).values
        np.testing.assert_allclose(values, np.roll(values[::-1], 1), atol=1e-12, rtol=0)

    @pytest.mark.parametrize("J", [10, 11, 12])
    def test_parseval_in_the_two_pi_convention(self, series, J):
        I_n = periodogram(series, J)
        assert 2 * math.pi * I_n.integral() == pytest.approx(series.samples.var(), rel=1e-8)

    def test_nonnegative(self, series):
        assert periodogram(series, 10).values.min() >= 0.0

    def test_constant_series_has_zero_periodogram(self):
        series = TimeSeries(samples=np.full(64, 3.0))
        np.testing.assert_allclose(periodogram(series, 6).values, 0.0, atol=1e-20)

    def test_matches_defining_sum(self, rng):
        x = rng.standard_normal(40)
        series = TimeSeries(samples=x)
        I_n = periodogram(series, 6)
        centered = x - x.mean()
        t = np.arange(x.size)
        for i in (0, 3, 17, 40):
            omega = i / 64
            direct = abs(np.sum(centered * np.exp(2j * np.pi * omega * t))) ** 2 / (2 * np.pi * x.size)
            assert I_n.values[i] == pytest.approx(direct, abs=1e-12)

    def test_coarse_grid_warns_but_stays_exact(self, rng):
        x = rng.standard_normal(100)
        series = TimeSeries(samples=x)
        with pytest.warns(WavespecWarning, match="smaller than n"):
            I_n = periodogram(series, 5)
        centered = x - x.mean()
        t = np.arange(x.size)
        direct = abs(np.sum(centered * np.exp(2j * np.pi * (5 / 32) * t))) ** 2 / (2 * np.pi * x.size)
        assert I_n.values[5] == pytest.approx(direct, abs=1e-12)

    def test_invalid_exponent(self, series):
        with pytest.raises(InvalidArgumentError):
            periodogram(series, 0)

    def test_white_noise_mean_level(self, white_noise):
        """Average over seeds of the grid mean is close to 1/(2 pi)"""
        levels = [periodogram(simulate(white_noise, 1024, seed=s), 10).integral() for s in range(200)]
        assert np.mean(levels) == pytest.approx(1 / (2 * math.pi), rel=0.05)


@pytest.mark.unit
class TestGridAndConstants:

    @pytest.mark.parametrize(
        "n,j1,expected",
        [(1024, None, 10), (1024, 8, 12), (1000, None, 10), (10, None, 6), (4096, 9, 13)],
    )
    def test_default_grid_exponent(self, n, j1, expected):
        assert default_grid_exponent(n, j1) == expected

    def test_bias_constant_white_noise(self):
        assert bias_constant([1.0]) == pytest.approx(math.sqrt(39) / (2 * math.pi))

    def test_bias_constant_uses_both_lag_signs(self):
        rho = [2.0, 0.5]
        c1 = 2.0 + 2 * 0.5
        c2 = 2 * 1 * 0.25
        assert bias_constant(rho) == pytest.approx(math.sqrt((c2 + 39 * c1 ** 2) / (4 * math.pi ** 2)))

    def test_bias_constant_needs_rho0(self):
        with pytest.raises(InvalidArgumentError):
            bias_constant([])
