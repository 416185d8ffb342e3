"""
wavespec command-line interface

Exit codes: 0 success, 2 projection did not converge, 1 invalid
configuration or any other wavespec error.
"""

import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import typer
from pydantic import ValidationError

from .config import Settings, get_settings
from .exceptions import InvalidArgumentError, WavespecError
from .schemas import ArmaNoiseParams, EstimatorType, RunConfig, SolverOptions
from .services.artifact_service import ArtifactService
from .services.experiment_service import (
    run_compare_study,
    run_deviation_study,
    run_estimate,
    run_rate_study,
    run_simulate,
    run_sup_norm_study,
)
from .services.telemetry_service import TelemetryService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2

MODELS: Dict[str, Callable[[], ArmaNoiseParams]] = {
    "two-peak": ArmaNoiseParams.two_peak_model,
    "white-noise": ArmaNoiseParams.white_noise,
}

app = typer.Typer(
    name="wavespec",
    help="Positive wavelet spectral density estimation and Monte Carlo studies.",
    no_args_is_help=True,
    add_completion=False,
)


def configure_logging(settings: Settings) -> None:
    """JSON logs in production or when log_json is set, human-readable otherwise"""
    level = getattr(logging, settings.log_level)
    if settings.log_json or settings.is_production:
        from pythonjsonlogger import jsonlogger

        json_handler = logging.StreamHandler()
        json_handler.setFormatter(
            jsonlogger.JsonFormatter(fmt="%(asctime)s %(name)s %(levelname)s %(message)s")
        )
        logging.basicConfig(level=level, handlers=[json_handler], force=True)
    else:
        logging.basicConfig(
            level=level,
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            force=True,
        )


def build_config(
    config_file: Optional[Path] = None,
    model: Optional[str] = None,
    **overrides: Any,
) -> RunConfig:
    """
    Merge Settings defaults, an optional JSON config file and CLI flags
    (flags win). Unset flags (None) leave the lower layers alone.
    """
    settings = get_settings()
    values: Dict[str, Any] = {
        "wavelet_filter": settings.wavelet_filter,
        "grid_j": settings.grid_j,
        "delta": settings.delta,
        "b_const": settings.b_const,
        "threshold_scale": settings.threshold_scale,
        "kappa": settings.kappa,
        "poly_degree": settings.poly_degree,
        "eta": settings.eta,
        "out": settings.output_dir,
        "solver": SolverOptions(
            tol=settings.solver_tol,
            max_iters=settings.solver_max_iters,
            initial_step=settings.solver_initial_step,
            step_growth=settings.solver_step_growth,
            step_cap=settings.solver_step_cap,
            min_step=settings.solver_min_step,
        ),
    }

    if config_file is not None:
        try:
            values.update(json.loads(Path(config_file).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidArgumentError(f"Cannot read config file {config_file}: {e}") from e

    values.update({key: value for key, value in overrides.items() if value is not None})

    if model is not None:
        if model not in MODELS:
            raise InvalidArgumentError(f"unknown model '{model}'; choose from {sorted(MODELS)}")
        values["model"] = MODELS[model]()
        values.pop("input_csv", None)
    elif values.get("model") is None and values.get("input_csv") is None:
        values["model"] = ArmaNoiseParams.two_peak_model()

    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise InvalidArgumentError(f"Invalid run configuration: {e}") from e


def _guarded(action: Callable[[], int]) -> None:
    """Run a command body and translate errors into exit codes"""
    try:
        try:
            code = action()
        except ValidationError as e:
            raise InvalidArgumentError(f"Invalid value produced during the run: {e}") from e
    except WavespecError as e:
        logger.error(
            "Command failed",
            extra={"error": str(e), "error_type": type(e).__name__, "error_code": e.error_code},
        )
        typer.echo(f"error: {e}", err=True)
        raise typer.Exit(code=EXIT_INVALID)
    raise typer.Exit(code=code)


def _write_study(
    config: RunConfig,
    name: str,
    table,
    summary: Dict[str, Any],
    xlabel: str,
    telemetry: TelemetryService,
) -> ArtifactService:
    artifacts = ArtifactService(config.out)
    artifacts.write_frame(name, table)
    artifacts.write_json(f"{name}_summary", {"config": config.model_dump(mode="json"), **summary})
    if config.gnuplot:
        artifacts.write_gnuplot([name], title=name, xlabel=xlabel)
    telemetry.write(artifacts.out_dir)
    return artifacts


# === Shared options ===

ConfigOption = typer.Option(None, "--config", help="JSON file with RunConfig fields")
ModelOption = typer.Option(None, "--model", help="Built-in model: two-peak or white-noise")
InputOption = typer.Option(None, "--input", help="Single-column CSV series instead of a model")
NOption = typer.Option(None, "--n", help="Sample size")
SeedOption = typer.Option(None, "--seed", help="Root seed")
EstimatorOption = typer.Option(None, "--estimator", help="linear, hard_oracle, hard_adaptive or baseline_histogram")
SmoothnessOption = typer.Option(None, "--s", help="Smoothness s (> 1/2) for the linear estimator")
DeltaOption = typer.Option(None, "--delta", help="Threshold constant delta")
BOption = typer.Option(None, "--b", help="Constant b in [3/4, 1) of the data-driven threshold")
ScaleOption = typer.Option(None, "--threshold-scale", help="Multiplier on every level threshold (1 = stated formulas)")
KappaOption = typer.Option(None, "--kappa", help="kappa of the sup-norm pre-estimator")
ROption = typer.Option(None, "--r", help="Polynomial degree r of the sup-norm pre-estimator")
EtaOption = typer.Option(None, "--eta", help="Clipping floor for the initial log-density")
GridOption = typer.Option(None, "--grid-j", help="Grid exponent J (grid of 2^J points)")
OutOption = typer.Option(None, "--out", help="Output directory")
GnuplotOption = typer.Option(False, "--gnuplot", help="Also write plot.gp")
WorkersOption = typer.Option(None, "--workers", help="Monte Carlo worker processes")


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Override WAVESPEC_LOG_LEVEL"),
    log_json: bool = typer.Option(False, "--log-json", help="Emit JSON log records"),
) -> None:
    settings = get_settings()
    updates: Dict[str, Any] = {}
    if log_level:
        updates["log_level"] = log_level.upper()
    if log_json:
        updates["log_json"] = True
    configure_logging(settings.model_copy(update=updates) if updates else settings)


@app.command()
def simulate(
    config_file: Optional[Path] = ConfigOption,
    model: Optional[str] = ModelOption,
    n: Optional[int] = NOption,
    seed: Optional[int] = SeedOption,
    out: Optional[Path] = OutOption,
) -> None:
    """Simulate the model and write series.csv"""

    def action() -> int:
        config = build_config(config_file, model, n=n, seed=seed, out=out)
        artifacts = run_simulate(config)
        typer.echo(artifacts.written["series"])
        return EXIT_OK

    _guarded(action)


@app.command()
def estimate(
    config_file: Optional[Path] = ConfigOption,
    model: Optional[str] = ModelOption,
    input_csv: Optional[Path] = InputOption,
    n: Optional[int] = NOption,
    seed: Optional[int] = SeedOption,
    estimator: Optional[EstimatorType] = EstimatorOption,
    smoothness: Optional[float] = SmoothnessOption,
    delta: Optional[float] = DeltaOption,
    b_const: Optional[float] = BOption,
    threshold_scale: Optional[float] = ScaleOption,
    kappa: Optional[float] = KappaOption,
    poly_degree: Optional[int] = ROption,
    eta: Optional[float] = EtaOption,
    grid_j: Optional[int] = GridOption,
    out: Optional[Path] = OutOption,
    gnuplot: bool = GnuplotOption,
) -> None:
    """Estimate the spectral density and write the run artifacts"""

    def action() -> int:
        config = build_config(
            config_file,
            model,
            input_csv=input_csv,
            n=n,
            seed=seed,
            estimator=estimator,
            smoothness=smoothness,
            delta=delta,
            b_const=b_const,
            threshold_scale=threshold_scale,
            kappa=kappa,
            poly_degree=poly_degree,
            eta=eta,
            grid_j=grid_j,
            out=out,
            gnuplot=gnuplot or None,
        )
        telemetry = TelemetryService()
        report = run_estimate(config, telemetry)
        telemetry.write(config.out)
        typer.echo(report.artifacts["report"])
        if not report.succeeded:
            typer.echo(
                f"projection did not converge: residual {report.projection.residual_norm:.3e}"
                f" after {report.projection.iterations} iterations",
                err=True,
            )
            return EXIT_NOT_CONVERGED
        return EXIT_OK

    _guarded(action)


@app.command("deviation-study")
def deviation_study(
    config_file: Optional[Path] = ConfigOption,
    model: Optional[str] = ModelOption,
    n: Optional[int] = NOption,
    seed: Optional[int] = SeedOption,
    x_values: List[float] = typer.Option([1.0, 2.0, 3.0], "--x", help="Deviation levels x"),
    reps: int = typer.Option(2000, "--reps", min=1),
    level: Optional[int] = typer.Option(None, "--level", help="Detail level j (default j0)"),
    position: Optional[int] = typer.Option(None, "--position", help="Translation k"),
    grid_j: Optional[int] = GridOption,
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
    gnuplot: bool = GnuplotOption,
) -> None:
    """Empirical exceedance of the coefficient deviation bound against 2 e^{-x}"""

    def action() -> int:
        config = build_config(
            config_file, model, n=n, seed=seed, grid_j=grid_j, out=out, gnuplot=gnuplot or None
        )
        telemetry = TelemetryService()
        table = run_deviation_study(config, x_values, reps, level, position, workers, telemetry)
        _write_study(config, "deviation", table, {"reps": reps}, "x", telemetry)
        typer.echo(table.to_string(index=False))
        return EXIT_OK

    _guarded(action)


@app.command("rate-study")
def rate_study(
    config_file: Optional[Path] = ConfigOption,
    model: Optional[str] = ModelOption,
    seed: Optional[int] = SeedOption,
    estimator: Optional[EstimatorType] = EstimatorOption,
    smoothness: Optional[float] = SmoothnessOption,
    threshold_scale: Optional[float] = ScaleOption,
    n_values: List[int] = typer.Option([256, 512, 1024, 2048, 4096], "--n-values"),
    reps: int = typer.Option(20, "--reps", min=1),
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
    gnuplot: bool = GnuplotOption,
) -> None:
    """Median KL divergence against n, with a fitted log-log slope"""

    def action() -> int:
        config = build_config(
            config_file,
            model,
            seed=seed,
            estimator=estimator,
            smoothness=smoothness,
            threshold_scale=threshold_scale,
            out=out,
            gnuplot=gnuplot or None,
        )
        telemetry = TelemetryService()
        table, slope = run_rate_study(config, n_values, reps, workers, telemetry)
        _write_study(config, "rate", table, {"reps": reps, "slope": slope}, "n", telemetry)
        typer.echo(table.to_string(index=False))
        typer.echo(f"log-log slope: {slope:.4f}")
        return EXIT_OK

    _guarded(action)


@app.command()
def compare(
    config_file: Optional[Path] = ConfigOption,
    model: Optional[str] = ModelOption,
    n: Optional[int] = NOption,
    seed: Optional[int] = SeedOption,
    estimator: Optional[EstimatorType] = EstimatorOption,
    threshold_scale: Optional[float] = ScaleOption,
    reps: int = typer.Option(20, "--reps", min=1),
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
    gnuplot: bool = GnuplotOption,
) -> None:
    """Wavelet projection against the oracle-m histogram baseline"""

    def action() -> int:
        config = build_config(
            config_file,
            model,
            n=n,
            seed=seed,
            estimator=estimator,
            threshold_scale=threshold_scale,
            out=out,
            gnuplot=gnuplot or None,
        )
        telemetry = TelemetryService()
        table, summary = run_compare_study(config, reps, workers, telemetry)
        _write_study(config, "compare", table, summary, "replication", telemetry)
        typer.echo(json.dumps(summary, sort_keys=True, indent=2))
        return EXIT_OK

    _guarded(action)


@app.command("sup-norm-study")
def sup_norm_study(
    config_file: Optional[Path] = ConfigOption,
    model: Optional[str] = ModelOption,
    n: Optional[int] = NOption,
    seed: Optional[int] = SeedOption,
    b_const: Optional[float] = BOption,
    kappa: Optional[float] = KappaOption,
    poly_degree: Optional[int] = ROption,
    reps: int = typer.Option(200, "--reps", min=1),
    out: Optional[Path] = OutOption,
    workers: Optional[int] = WorkersOption,
    gnuplot: bool = GnuplotOption,
) -> None:
    """How often the sup-norm pre-estimator lands within a factor b of ||f||_inf"""

    def action() -> int:
        config = build_config(
            config_file,
            model,
            n=n,
            seed=seed,
            b_const=b_const,
            kappa=kappa,
            poly_degree=poly_degree,
            out=out,
            gnuplot=gnuplot or None,
        )
        telemetry = TelemetryService()
        table, frequency = run_sup_norm_study(config, reps, workers, telemetry)
        _write_study(config, "sup_norm", table, {"reps": reps, "frequency": frequency}, "replication", telemetry)
        typer.echo(f"event frequency: {frequency:.4f}")
        return EXIT_OK

    _guarded(action)


if __name__ == "__main__":
    app()
