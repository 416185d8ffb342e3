"""
Prometheus Telemetry Service for wavespec
Counts runs, projections and Monte Carlo replications and times pipeline stages
"""

import logging
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, Optional

from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

from ..config import get_settings
from ..schemas import ProjectionReport

logger = logging.getLogger(__name__)


class TelemetryService:
    """Prometheus collectors on a private registry, plus plain stage timings"""

    def __init__(self, enabled: Optional[bool] = None):
        self.settings = get_settings()
        self.enabled = self.settings.enable_telemetry if enabled is None else enabled
        self.registry = CollectorRegistry()
        self.timings: Dict[str, float] = {}
        self._setup_metrics()

    def _setup_metrics(self) -> None:
        """Initialize all Prometheus metrics"""

        # === Pipeline Metrics ===
        self.runs_total = Counter(
            "wavespec_runs_total",
            "Total number of estimation runs",
            ["estimator", "outcome"],
            registry=self.registry,
        )

        self.stage_duration = Histogram(
            "wavespec_stage_duration_seconds",
            "Time spent in each pipeline stage",
            ["stage"],
            buckets=[0.001, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 30.0, 60.0, 300.0],
            registry=self.registry,
        )

        # === Solver Metrics ===
        self.projections_total = Counter(
            "wavespec_projections_total",
            "Information projections by convergence outcome",
            ["converged"],
            registry=self.registry,
        )

        self.projection_iterations = Histogram(
            "wavespec_projection_iterations",
            "Accepted gradient steps per projection",
            buckets=[10, 100, 1000, 5000, 10000, 25000, 50000],
            registry=self.registry,
        )

        # === Monte Carlo Metrics ===
        self.replications_total = Counter(
            "wavespec_monte_carlo_replications_total",
            "Monte Carlo replications completed",
            ["study"],
            registry=self.registry,
        )

    @contextmanager
    def track_stage(self, stage: str) -> Iterator[None]:
        """Time a pipeline stage; the duration is kept even if the stage raises"""
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.timings[stage] = self.timings.get(stage, 0.0) + elapsed
            if self.enabled:
                self.stage_duration.labels(stage=stage).observe(elapsed)

    def record_projection(self, report: ProjectionReport) -> None:
        if not self.enabled:
            return
        self.projections_total.labels(converged=str(report.converged).lower()).inc()
        self.projection_iterations.observe(report.iterations)

    def record_run(self, estimator: str, outcome: str) -> None:
        if self.enabled:
            self.runs_total.labels(estimator=estimator, outcome=outcome).inc()

    def record_replications(self, study: str, count: int) -> None:
        if self.enabled:
            self.replications_total.labels(study=study).inc(count)

    def write(self, directory: Path) -> Optional[Path]:
        """Dump the registry in the text exposition format"""
        if not self.enabled:
            return None
        path = Path(directory) / "metrics.prom"
        try:
            write_to_textfile(str(path), self.registry)
        except OSError as e:
            logger.error(f"Failed to write telemetry file {path}: {e}")
            return None
        return path
