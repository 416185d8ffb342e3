"""
Unit Tests for the Prometheus telemetry service
"""

import pytest

from wavespec.schemas import ExpFamilyParams, ProjectionReport
from wavespec.services.telemetry_service import TelemetryService


def _report(converged: bool) -> ProjectionReport:
    return ProjectionReport(
        theta_hat=ExpFamilyParams.zeros(0, 1),
        residual_norm=1e-9 if converged else 1.0,
        iterations=42,
        converged=converged,
    )


@pytest.mark.unit
class TestTelemetryService:

    def test_stage_timings_accumulate(self):
        telemetry = TelemetryService(enabled=True)
        with telemetry.track_stage("projection"):
            pass
        with telemetry.track_stage("projection"):
            pass
        assert telemetry.timings["projection"] >= 0.0
        count = telemetry.registry.get_sample_value(
            "wavespec_stage_duration_seconds_count", {"stage": "projection"}
        )
        assert count == 2

    def test_timing_kept_when_stage_fails(self):
        telemetry = TelemetryService(enabled=True)
        with pytest.raises(RuntimeError):
            with telemetry.track_stage("threshold"):
                raise RuntimeError("boom")
        assert "threshold" in telemetry.timings

    def test_counters(self):
        telemetry = TelemetryService(enabled=True)
        telemetry.record_run("hard_adaptive", "converged")
        telemetry.record_projection(_report(True))
        telemetry.record_projection(_report(False))
        telemetry.record_replications("rate", 20)

        registry = telemetry.registry
        assert registry.get_sample_value(
            "wavespec_runs_total", {"estimator": "hard_adaptive", "outcome": "converged"}
        ) == 1
        assert registry.get_sample_value("wavespec_projections_total", {"converged": "true"}) == 1
        assert registry.get_sample_value("wavespec_projections_total", {"converged": "false"}) == 1
        assert registry.get_sample_value("wavespec_projection_iterations_sum") == 84
        assert registry.get_sample_value("wavespec_monte_carlo_replications_total", {"study": "rate"}) == 20

    def test_disabled_records_nothing(self, tmp_path):
        telemetry = TelemetryService(enabled=False)
        telemetry.record_run("linear", "converged")
        with telemetry.track_stage("simulate"):
            pass
        assert "simulate" in telemetry.timings
        assert telemetry.write(tmp_path) is None
        assert not (tmp_path / "metrics.prom").exists()

    def test_write_textfile(self, tmp_path):
        telemetry = TelemetryService(enabled=True)
        telemetry.record_run("linear", "converged")
        path = telemetry.write(tmp_path)
        assert path == tmp_path / "metrics.prom"
        assert "wavespec_runs_total" in path.read_text()

    def test_default_follows_settings(self, monkeypatch):
        monkeypatch.setenv("WAVESPEC_ENABLE_TELEMETRY", "false")
        from wavespec.config import get_settings

        get_settings.cache_clear()
        assert TelemetryService().enabled is False
