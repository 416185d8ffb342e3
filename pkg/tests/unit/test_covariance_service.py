"""
Unit Tests for spectral-to-covariance conversion and the Toeplitz PSD check
"""

import numpy as np
import pytest
from pydantic import ValidationError

from wavespec.exceptions import InvalidArgumentError, WavespecWarning
from wavespec.schemas import CovarianceSequence, CovarianceSource, GridFunction
from wavespec.services.covariance_service import (
    covariance_from_estimate,
    is_positive_semidefinite,
    min_toeplitz_eigenvalue,
    spectral_to_covariance,
    symmetrized,
)
from wavespec.services.process_service import true_covariance, true_spectral_density
from tests.factories import AR1Factory


@pytest.mark.unit
class TestSpectralToCovariance:

    def test_white_noise_round_trip(self):
        f = GridFunction(values=np.full(1024, 1 / (2 * np.pi)))
        rho = spectral_to_covariance(f, 4)
        np.testing.assert_allclose(rho.rho, [1.0, 0.0, 0.0, 0.0, 0.0], atol=1e-12)
        assert rho.source is CovarianceSource.NONLINEAR_ESTIMATE
        assert rho.max_lag == 4

    def test_agrees_with_true_covariance(self, two_peak_model):
        f = true_spectral_density(two_peak_model, 2 ** 12)
        rho = spectral_to_covariance(f, 20, CovarianceSource.TRUE)
        np.testing.assert_allclose(rho.rho, true_covariance(two_peak_model, 20, quadrature_j=12), atol=1e-10)

    def test_ar1_covariance(self):
        params = AR1Factory(ar=(-0.5,))
        rho = spectral_to_covariance(true_spectral_density(params, 2 ** 12), 5)
        np.testing.assert_allclose(rho.rho, 0.5 ** np.arange(6) / 0.75, atol=1e-10)

    def test_asymmetric_input_warns(self):
        f = GridFunction(values=1.0 + np.arange(64) / 64)
        with pytest.warns(WavespecWarning, match="not symmetric"):
            rho = spectral_to_covariance(f, 3)
        expected = spectral_to_covariance(symmetrized(f), 3)
        np.testing.assert_allclose(rho.rho, expected.rho, atol=1e-12)

    def test_lag_range(self):
        with pytest.raises(InvalidArgumentError):
            spectral_to_covariance(GridFunction(values=np.ones(64)), 32)

    def test_symmetrized_is_symmetric(self, rng):
        g = symmetrized(GridFunction(values=rng.uniform(size=128)))
        np.testing.assert_allclose(g.values, np.roll(g.values[::-1], 1), atol=0)

    def test_estimate_conversion_symmetrizes_and_tags(self):
        f = GridFunction(values=1.0 + np.arange(64) / 64)
        rho = covariance_from_estimate(f, 3, CovarianceSource.LINEAR_ESTIMATE)
        assert rho.source is CovarianceSource.LINEAR_ESTIMATE
        np.testing.assert_allclose(rho.rho, spectral_to_covariance(symmetrized(f), 3).rho, atol=1e-12)

    def test_negative_estimate_converts_when_tagged_unconstrained(self):
        omega = np.arange(256) / 256
        f = GridFunction(values=0.1 + np.cos(2 * np.pi * omega))
        rho = covariance_from_estimate(f, 4, CovarianceSource.UNCONSTRAINED_ESTIMATE)
        assert abs(rho.rho[1]) > rho.rho[0]


@pytest.mark.unit
class TestToeplitz:

    def test_identity(self):
        assert min_toeplitz_eigenvalue([1.0, 0.0, 0.0], 3) == pytest.approx(1.0)

    def test_indefinite_sequence(self):
        rho = [1.0, 0.9, 0.0]
        assert min_toeplitz_eigenvalue(rho, 3) == pytest.approx(1 - 0.9 * np.sqrt(2))
        assert not is_positive_semidefinite(rho, 3)

    def test_true_covariance_is_psd(self, two_peak_model):
        rho = CovarianceSequence(rho=true_covariance(two_peak_model, 127))
        assert is_positive_semidefinite(rho, 128)

    def test_dimension_checked(self):
        with pytest.raises(InvalidArgumentError):
            min_toeplitz_eigenvalue([1.0, 0.5], 3)


@pytest.mark.unit
class TestCovarianceSequence:

    def test_bound_enforced_for_estimates(self):
        with pytest.raises(ValidationError):
            CovarianceSequence(rho=[1.0, 2.0], source=CovarianceSource.NONLINEAR_ESTIMATE)

    def test_unconstrained_may_break_bound(self):
        rho = CovarianceSequence(rho=[1.0, 2.0], source=CovarianceSource.UNCONSTRAINED_ESTIMATE)
        assert rho.max_lag == 1
