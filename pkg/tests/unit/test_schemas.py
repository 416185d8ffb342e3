"""
Unit Tests for pydantic schemas and their validators
"""

import numpy as np
import pytest
from pydantic import ValidationError

from wavespec.schemas import (
    ArmaNoiseParams,
    EstimatorType,
    ExpFamilyParams,
    GridFunction,
    ProjectionReport,
    RunConfig,
    ThresholdMode,
    ThresholdPlan,
    TimeSeries,
    WaveletCoefficients,
)
from tests.factories import RunConfigFactory


@pytest.mark.unit
class TestArmaNoiseParams:

    def test_two_peak_model_roots_outside_unit_circle(self):
        roots = ArmaNoiseParams.two_peak_model().ar_roots()
        assert roots.size == 2
        assert np.abs(roots).min() > 1.0

    def test_unit_root_rejected(self):
        with pytest.raises(ValidationError, match="nonstationary"):
            ArmaNoiseParams(ar=(-1.0,))

    def test_empty_ma_rejected(self):
        with pytest.raises(ValidationError):
            ArmaNoiseParams(ma=())

    def test_trailing_zero_ar_is_white(self):
        assert ArmaNoiseParams(ar=(0.0,)).ar_roots().size == 0


@pytest.mark.unit
class TestArrays:

    def test_grid_needs_power_of_two(self):
        with pytest.raises(ValidationError):
            GridFunction(values=np.ones(100))

    def test_grid_properties(self):
        g = GridFunction(values=np.full(16, 2.0))
        assert g.J == 4
        assert g.size == 16
        assert g.omega[1] == pytest.approx(1 / 16)
        assert g.integral() == pytest.approx(2.0)

    def test_series_rejects_non_finite(self):
        with pytest.raises(ValidationError):
            TimeSeries(samples=[1.0, np.inf])

    def test_coefficient_shapes(self):
        with pytest.raises(ValidationError):
            WaveletCoefficients(j0=1, j1=2, a=[1.0], b={1: [0.0, 0.0]})

    def test_vector_layout(self):
        coeffs = WaveletCoefficients(j0=1, j1=3, a=[1.0, 2.0], b={1: [3.0, 4.0], 2: [5.0, 6.0, 7.0, 8.0]})
        vector = coeffs.to_vector()
        np.testing.assert_array_equal(vector, np.arange(1.0, 9.0))
        assert WaveletCoefficients.from_vector(vector, 1, 3).b[2].tolist() == [5.0, 6.0, 7.0, 8.0]

    def test_theta_size_checked(self):
        with pytest.raises(ValidationError):
            ExpFamilyParams(theta=np.zeros(5), j0=0, j1=3)


@pytest.mark.unit
class TestThresholdPlan:

    def test_decreasing_thresholds_rejected(self):
        with pytest.raises(ValidationError):
            ThresholdPlan(mode=ThresholdMode.ORACLE, per_level={3: 0.5, 4: 0.1}, delta=6.0, f_sup=1.0)

    def test_levels_are_sorted(self):
        plan = ThresholdPlan(mode=ThresholdMode.ORACLE, per_level={4: 0.5, 3: 0.1}, delta=6.0, f_sup=1.0)
        assert list(plan.per_level) == [3, 4]


@pytest.mark.unit
class TestRunConfig:

    def test_factory_defaults(self):
        config = RunConfigFactory()
        assert config.has_truth
        assert config.estimator is EstimatorType.HARD_ADAPTIVE

    def test_model_or_input_required(self, tmp_path):
        with pytest.raises(ValidationError, match="exactly one"):
            RunConfig()
        with pytest.raises(ValidationError, match="exactly one"):
            RunConfig(model=ArmaNoiseParams.white_noise(), input_csv=tmp_path / "x.csv")

    def test_oracle_needs_model(self, tmp_path):
        with pytest.raises(ValidationError, match="hard_oracle"):
            RunConfig(input_csv=tmp_path / "x.csv", estimator=EstimatorType.HARD_ORACLE)

    @pytest.mark.parametrize("smoothness", [None, 0.5, 0.2])
    def test_linear_needs_smoothness(self, smoothness):
        with pytest.raises(ValidationError, match="smoothness"):
            RunConfigFactory(estimator=EstimatorType.LINEAR, smoothness=smoothness)

    def test_psd_dimension_bounded_by_lags(self):
        with pytest.raises(ValidationError):
            RunConfigFactory(max_lag=10, psd_dim=12)

    def test_json_round_trip(self):
        config = RunConfigFactory(smoothness=1.5)
        assert RunConfig.model_validate_json(config.model_dump_json()) == config


@pytest.mark.unit
class TestProjectionReport:

    def test_converged_flag_needs_small_residual(self):
        with pytest.raises(ValidationError):
            ProjectionReport(
                theta_hat=ExpFamilyParams.zeros(0, 1), residual_norm=1e-3, iterations=5, converged=True
            )

    def test_unconverged_report(self):
        report = ProjectionReport(
            theta_hat=ExpFamilyParams.zeros(0, 1), residual_norm=1e-3, iterations=5, converged=False
        )
        assert not report.converged
