"""
End-to-End Tests for the wavespec command line
"""

import json

import pandas as pd
import pytest
from pydantic import ValidationError
from typer.testing import CliRunner

from wavespec.cli import EXIT_INVALID, EXIT_NOT_CONVERGED, EXIT_OK, app, build_config
from wavespec.exceptions import InvalidArgumentError
from wavespec.schemas import CovarianceSequence, EstimatorType

runner = CliRunner()


def _invoke(*args):
    return runner.invoke(app, [str(arg) for arg in args])


@pytest.mark.e2e
class TestSimulate:

    def test_writes_series(self, tmp_path):
        result = _invoke("simulate", "--model", "white-noise", "--n", 300, "--seed", 1, "--out", tmp_path)
        assert result.exit_code == EXIT_OK, result.output
        assert len((tmp_path / "series.csv").read_text().splitlines()) == 300

    def test_unknown_model(self, tmp_path):
        result = _invoke("simulate", "--model", "pink-noise", "--out", tmp_path)
        assert result.exit_code == EXIT_INVALID


@pytest.mark.e2e
class TestEstimate:

    def test_full_run_with_plot(self, tmp_path):
        result = _invoke(
            "estimate", "--model", "white-noise", "--n", 512, "--seed", 2, "--out", tmp_path, "--gnuplot"
        )
        assert result.exit_code == EXIT_OK, result.output
        for name in ("report.json", "estimate.csv", "periodogram.csv", "covariance.csv", "plot.gp", "metrics.prom"):
            assert (tmp_path / name).exists(), name
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["projection"]["converged"] is True
        assert report["covariance"]["positive_semidefinite"] is True
        assert "estimate.csv" in (tmp_path / "plot.gp").read_text()

    def test_json_logging_flag(self, tmp_path):
        result = _invoke("--log-json", "estimate", "--model", "white-noise", "--n", 256, "--out", tmp_path)
        assert result.exit_code == EXIT_OK, result.output

    def test_linear_needs_smoothness(self, tmp_path):
        result = _invoke("estimate", "--model", "white-noise", "--estimator", "linear", "--out", tmp_path)
        assert result.exit_code == EXIT_INVALID

    def test_b_outside_range(self, tmp_path):
        result = _invoke("estimate", "--model", "white-noise", "--n", 256, "--b", 0.5, "--out", tmp_path)
        assert result.exit_code == EXIT_INVALID

    def test_missing_input_file(self, tmp_path):
        result = _invoke("estimate", "--input", tmp_path / "absent.csv", "--out", tmp_path / "out")
        assert result.exit_code == EXIT_INVALID

    def test_non_convergence_exit_code(self, tmp_path):
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"solver": {"max_iters": 1, "tol": 1e-12}}))
        out = tmp_path / "out"
        result = _invoke("estimate", "--config", config_file, "--model", "two-peak", "--seed", 3, "--out", out)
        assert result.exit_code == EXIT_NOT_CONVERGED
        assert (out / "estimate.csv").exists()
        report = json.loads((out / "report.json").read_text())
        assert report["projection"]["converged"] is False
        assert report["projection"]["stop_reason"] == "max_iters"

    def test_validation_error_during_run_exits_invalid(self, tmp_path, mocker):
        def broken_run(config, telemetry):
            return CovarianceSequence(rho=[1.0, 2.0])

        mocker.patch("wavespec.cli.run_estimate", side_effect=broken_run)
        result = _invoke("estimate", "--model", "white-noise", "--n", 256, "--out", tmp_path)
        assert result.exit_code == EXIT_INVALID
        assert not isinstance(result.exception, ValidationError)

    def test_threshold_scale_flag(self, tmp_path):
        result = _invoke(
            "estimate", "--model", "white-noise", "--n", 256, "--threshold-scale", 0.5, "--out", tmp_path
        )
        assert result.exit_code == EXIT_OK, result.output
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["config"]["threshold_scale"] == 0.5
        assert report["threshold_plan"]["scale"] == 0.5

    def test_estimate_from_simulated_file(self, tmp_path):
        _invoke("simulate", "--model", "white-noise", "--n", 400, "--seed", 8, "--out", tmp_path / "sim")
        out = tmp_path / "est"
        result = _invoke("estimate", "--input", tmp_path / "sim" / "series.csv", "--out", out)
        assert result.exit_code == EXIT_OK, result.output
        assert not (out / "truth.csv").exists()


@pytest.mark.e2e
class TestBuildConfig:

    def test_flags_override_file(self, tmp_path):
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"n": 2048, "seed": 9, "estimator": "hard_oracle"}))
        config = build_config(config_file, "white-noise", n=512, seed=None)
        assert config.n == 512
        assert config.seed == 9
        assert config.estimator is EstimatorType.HARD_ORACLE

    def test_environment_defaults(self, monkeypatch):
        monkeypatch.setenv("WAVESPEC_DELTA", "4.5")
        monkeypatch.setenv("WAVESPEC_THRESHOLD_SCALE", "0.01")
        config = build_config(None, "white-noise")
        assert config.delta == 4.5
        assert config.threshold_scale == 0.01

    def test_default_model(self):
        assert build_config().model.noise_scale == 0.5

    def test_malformed_file(self, tmp_path):
        config_file = tmp_path / "config.json"
        config_file.write_text("{not json")
        with pytest.raises(InvalidArgumentError):
            build_config(config_file)


@pytest.mark.e2e
class TestStudies:

    def test_deviation_study(self, tmp_path):
        result = _invoke(
            "deviation-study", "--model", "white-noise", "--n", 256, "--reps", 20,
            "--x", 1, "--x", 2, "--out", tmp_path,
        )
        assert result.exit_code == EXIT_OK, result.output
        table = pd.read_csv(tmp_path / "deviation.csv")
        assert table["x"].tolist() == [1.0, 2.0]
        assert table["empirical"].between(0, 1).all()
        summary = json.loads((tmp_path / "deviation_summary.json").read_text())
        assert summary["reps"] == 20

    def test_sup_norm_study(self, tmp_path):
        result = _invoke("sup-norm-study", "--model", "white-noise", "--n", 256, "--reps", 10, "--out", tmp_path)
        assert result.exit_code == EXIT_OK, result.output
        assert len(pd.read_csv(tmp_path / "sup_norm.csv")) == 10
        summary = json.loads((tmp_path / "sup_norm_summary.json").read_text())
        assert 0.0 <= summary["frequency"] <= 1.0

    def test_rate_study(self, tmp_path):
        result = _invoke(
            "rate-study", "--model", "white-noise", "--n-values", 256, "--n-values", 512,
            "--reps", 3, "--out", tmp_path, "--gnuplot",
        )
        assert result.exit_code == EXIT_OK, result.output
        table = pd.read_csv(tmp_path / "rate.csv")
        assert table["n"].tolist() == [256, 512]
        assert (tmp_path / "plot.gp").exists()
        assert "slope" in json.loads((tmp_path / "rate_summary.json").read_text())

    def test_compare_study(self, tmp_path):
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"solver": {"max_iters": 300}}))
        out = tmp_path / "out"
        result = _invoke(
            "compare", "--config", config_file, "--model", "white-noise", "--n", 256, "--reps", 3, "--out", out
        )
        assert result.exit_code == EXIT_OK, result.output
        table = pd.read_csv(out / "compare.csv")
        assert len(table) == 3
        summary = json.loads((out / "compare_summary.json").read_text())
        assert summary["histogram_selection"] == "oracle"

    def test_compare_rejects_histogram_estimator(self, tmp_path):
        result = _invoke(
            "compare", "--model", "white-noise", "--estimator", "baseline_histogram", "--reps", 2, "--out", tmp_path
        )
        assert result.exit_code == EXIT_INVALID
