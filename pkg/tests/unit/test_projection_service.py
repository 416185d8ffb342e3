"""
Unit Tests for the wavelet exponential family and the information projection
"""

import numpy as np
import pytest

from wavespec.exceptions import DivergedParametersError, InvalidArgumentError
from wavespec.schemas import ExpFamilyParams, GridFunction, SolverOptions
from wavespec.services.projection_service import (
    coefficient_map,
    eval_family,
    existence_certificate,
    gradient,
    init_theta,
    objective,
    project,
)


def _random_params(rng, j0=0, j1=3, scale=0.3):
    return ExpFamilyParams(theta=rng.uniform(-scale, scale, size=2 ** j1), j0=j0, j1=j1)


@pytest.mark.unit
class TestFamily:

    def test_zero_parameters_give_unit_density(self, symmlet_basis):
        density = eval_family(ExpFamilyParams.zeros(0, 4), symmlet_basis)
        np.testing.assert_allclose(density.values, 1.0, atol=1e-12)

    def test_coefficients_of_unit_density(self, symmlet_basis):
        beta = coefficient_map(ExpFamilyParams.zeros(0, 4), symmlet_basis)
        expected = np.zeros(16)
        expected[0] = 1.0
        np.testing.assert_allclose(beta, expected, atol=1e-10)

    def test_density_strictly_positive(self, rng, symmlet_basis):
        params = _random_params(rng, 2, 6, scale=2.0)
        assert eval_family(params, symmlet_basis).values.min() > 0

    def test_overflow_detected(self, haar_basis):
        theta = np.zeros(8)
        theta[0] = 1000.0
        with pytest.raises(DivergedParametersError):
            eval_family(ExpFamilyParams(theta=theta, j0=0, j1=3), haar_basis)

    def test_family_level_beyond_grid(self, haar_basis):
        params = ExpFamilyParams.zeros(0, 11)
        with pytest.raises(InvalidArgumentError):
            eval_family(params, haar_basis)

    def test_serialized_theta_carries_indices(self):
        params = ExpFamilyParams(theta=[0.5, 0.25], j0=0, j1=1)
        dumped = params.model_dump(mode="json")
        assert dumped["theta"] == [[-1, 0, 0.5], [0, 0, 0.25]]
        assert params.as_mapping() == {(-1, 0): 0.5, (0, 0): 0.25}


@pytest.mark.unit
class TestGradient:

    def test_matches_central_differences(self, rng, symmlet_basis):
        params = _random_params(rng, 1, 4)
        targets = coefficient_map(_random_params(rng, 1, 4), symmlet_basis)
        analytic = gradient(params, targets, symmlet_basis)

        eps = 1e-6
        numeric = np.zeros_like(analytic)
        for i in range(params.theta.size):
            step = np.zeros_like(params.theta)
            step[i] = eps
            up = ExpFamilyParams(theta=params.theta + step, j0=1, j1=4)
            down = ExpFamilyParams(theta=params.theta - step, j0=1, j1=4)
            numeric[i] = (objective(up, targets, symmlet_basis) - objective(down, targets, symmlet_basis)) / (2 * eps)

        assert np.linalg.norm(numeric - analytic) <= 1e-5 * np.linalg.norm(analytic)

    def test_zero_at_solution(self, rng, symmlet_basis):
        params = _random_params(rng)
        targets = coefficient_map(params, symmlet_basis)
        np.testing.assert_allclose(gradient(params, targets, symmlet_basis), 0.0, atol=1e-12)


@pytest.mark.unit
class TestProject:

    @pytest.mark.parametrize("seed", range(5))
    def test_recovers_family_member(self, symmlet_basis, seed):
        rng = np.random.default_rng(seed)
        truth = _random_params(rng)
        targets = coefficient_map(truth, symmlet_basis)
        report = project(targets, ExpFamilyParams.zeros(0, 3), SolverOptions(tol=1e-8), symmlet_basis)

        assert report.converged
        assert report.stop_reason == "tolerance"
        assert np.linalg.norm(report.theta_hat.theta - truth.theta) <= 1e-4
        assert report.residual_norm <= 1e-8
        assert eval_family(report.theta_hat, symmlet_basis).values.min() > 0

    @pytest.mark.parametrize("level", [0.05, 0.5, 3.0])
    def test_constant_targets_give_constant_density(self, symmlet_basis, level):
        targets = symmlet_basis.analyze_vector(np.full(1024, level), 0, 3)
        report = project(targets, ExpFamilyParams.zeros(0, 3), SolverOptions(tol=1e-9), symmlet_basis)
        assert report.converged
        np.testing.assert_allclose(eval_family(report.theta_hat, symmlet_basis).values, level, atol=1e-6)
        assert report.theta_hat.theta[0] == pytest.approx(np.log(level), abs=1e-6)

    def test_objective_trace_decreases(self, rng, symmlet_basis):
        targets = coefficient_map(_random_params(rng), symmlet_basis)
        report = project(targets, ExpFamilyParams.zeros(0, 3), SolverOptions(), symmlet_basis)
        trace = np.array(report.objective_trace)
        assert np.all(np.diff(trace) <= 0)

    def test_iteration_budget_reported(self, rng, symmlet_basis):
        targets = coefficient_map(_random_params(rng, scale=1.0), symmlet_basis)
        report = project(
            targets, ExpFamilyParams.zeros(0, 3), SolverOptions(max_iters=1, tol=1e-12), symmlet_basis
        )
        assert not report.converged
        assert report.stop_reason == "max_iters"
        assert report.iterations == 1

    def test_already_solved(self, rng, symmlet_basis):
        truth = _random_params(rng)
        report = project(coefficient_map(truth, symmlet_basis), truth, SolverOptions(), symmlet_basis)
        assert report.converged
        assert report.iterations == 0

    def test_argument_checks(self, symmlet_basis):
        init = ExpFamilyParams.zeros(0, 3)
        with pytest.raises(InvalidArgumentError):
            project(np.zeros(4), init, basis=symmlet_basis)
        with pytest.raises(InvalidArgumentError):
            project(np.full(8, np.nan), init, basis=symmlet_basis)
        with pytest.raises(InvalidArgumentError):
            project(np.zeros(8), init)


@pytest.mark.unit
class TestInitAndCertificate:

    def test_init_clips_negative_values(self, haar_basis):
        unconstrained = GridFunction(values=np.full(1024, -1.0))
        params = init_theta(unconstrained, 1e-4, 0, 3, haar_basis)
        assert params.theta[0] == pytest.approx(np.log(1e-4))
        np.testing.assert_allclose(params.theta[1:], 0.0, atol=1e-10)
        np.testing.assert_allclose(eval_family(params, haar_basis).values, 1e-4, rtol=1e-8)

    def test_init_rejects_bad_eta(self, haar_basis):
        with pytest.raises(InvalidArgumentError):
            init_theta(GridFunction(values=np.ones(1024)), 0.0, 0, 3, haar_basis)

    def test_certificate_at_exact_targets(self, rng, symmlet_basis):
        theta0 = _random_params(rng)
        certificate = existence_certificate(theta0, coefficient_map(theta0, symmlet_basis), symmlet_basis)
        assert certificate.guaranteed
        assert certificate.distance == pytest.approx(0.0, abs=1e-12)
        assert certificate.kl_bound == pytest.approx(0.0, abs=1e-20)
        assert certificate.radius > 0

    def test_certificate_far_targets(self, rng, symmlet_basis):
        theta0 = _random_params(rng)
        targets = coefficient_map(theta0, symmlet_basis) + 10.0
        certificate = existence_certificate(theta0, targets, symmlet_basis)
        assert not certificate.guaranteed
        assert certificate.theta_bound > certificate.distance
