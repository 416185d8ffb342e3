"""
Experiment Service: end-to-end estimation runs and Monte Carlo studies.

A run goes simulate (or load) -> periodogram -> analyze -> threshold ->
init_theta -> project -> metrics + covariance check, and writes its
artifacts into the configured output directory.
"""

import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from functools import lru_cache
from typing import Callable, Iterator, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import signal

from ..config import get_settings
from ..exceptions import InvalidArgumentError, WavespecWarning
from ..schemas import (
    ArmaNoiseParams,
    ArrayModel,
    BesovSpec,
    CovarianceCheck,
    CovarianceSequence,
    CovarianceSource,
    EstimatorType,
    ExistenceCertificate,
    GridFunction,
    MetricsSummary,
    ProjectionReport,
    RunConfig,
    RunReport,
    ScaleMode,
    SupNormEstimate,
    ThresholdMode,
    ThresholdPlan,
    TimeSeries,
    WaveletCoefficients,
)
from .artifact_service import ArtifactService, coefficient_frame, covariance_frame, read_series_csv
from .covariance_service import covariance_from_estimate, is_positive_semidefinite, min_toeplitz_eigenvalue
from .metrics_service import (
    approx_diagnostics,
    besov_norm,
    density_range,
    kl_divergence,
    l2_distance,
    log_log_slope,
)
from .periodogram_service import bias_constant, default_grid_exponent, periodogram
from .process_service import simulate, true_covariance, true_spectral_density
from .projection_service import eval_family, existence_certificate, init_theta, project
from .telemetry_service import TelemetryService
from .threshold_service import (
    apply_threshold,
    build_plan,
    scale_levels,
    sup_norm_estimate,
    sup_norm_event,
    unconstrained_estimate,
)
from .wavelet_service import build_basis

logger = logging.getLogger(__name__)

ORACLE_COVARIANCE_LAGS = 2048
PEAK_TOLERANCE = 0.02
PEAK_PROMINENCE = 0.05
WAVELET_ESTIMATORS = (
    EstimatorType.LINEAR,
    EstimatorType.HARD_ORACLE,
    EstimatorType.HARD_ADAPTIVE,
)


class EstimationResult(ArrayModel):
    """In-memory output of one pass through the pipeline"""
    j0: int
    j1: int
    grid_j: int
    periodogram: GridFunction
    unconstrained: GridFunction
    estimate: GridFunction
    truth: Optional[GridFunction] = None
    coefficients: Optional[WaveletCoefficients] = None
    plan: Optional[ThresholdPlan] = None
    projection: Optional[ProjectionReport] = None
    existence: Optional[ExistenceCertificate] = None
    histogram_table: Optional[pd.DataFrame] = None
    histogram_best_m: Optional[int] = None


# === Helpers ===

def replication_seed(root: int, rep: int) -> int:
    """Seed of replication `rep`; independent of worker count and order"""
    return int(np.random.SeedSequence(root, spawn_key=(rep,)).generate_state(1)[0])


@contextmanager
def _quiet() -> Iterator[None]:
    """Silence per-replication WavespecWarnings inside Monte Carlo workers"""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WavespecWarning)
        yield


def _require_model(config: RunConfig) -> ArmaNoiseParams:
    if config.model is None:
        raise InvalidArgumentError("this study needs a known model (truth), not an input CSV")
    return config.model


def _map_replications(worker: Callable, tasks: list, workers: Optional[int]) -> list:
    workers = workers or get_settings().workers
    if workers > 1 and len(tasks) > 1:
        logger.info("Running replications in a process pool", extra={"workers": workers, "tasks": len(tasks)})
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(worker, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [worker(task) for task in tasks]


def oracle_constants(model: ArmaNoiseParams) -> Tuple[float, float]:
    """||f||_inf and C* from the known model, on the quadrature grid"""
    return _oracle_constants(model, get_settings().covariance_quadrature_j)


@lru_cache(maxsize=32)
def _oracle_constants(model: ArmaNoiseParams, quadrature_j: int) -> Tuple[float, float]:
    f_fine = true_spectral_density(model, 2 ** quadrature_j)
    max_lag = min(ORACLE_COVARIANCE_LAGS, 2 ** (quadrature_j - 1) - 1)
    rho = true_covariance(model, max_lag, quadrature_j)
    return float(f_fine.values.max()), bias_constant(rho)


def resolve_levels(config: RunConfig, n: int) -> Tuple[int, int]:
    if config.estimator is EstimatorType.LINEAR:
        return scale_levels(n, ScaleMode.LINEAR, config.smoothness)
    return scale_levels(n, ScaleMode.ADAPTIVE)


def resolve_grid_exponent(config: RunConfig, n: int, j1: int) -> int:
    """RunConfig.grid_j, then Settings.grid_j, then the default rule"""
    J = config.grid_j if config.grid_j is not None else get_settings().grid_j
    if J is None:
        return default_grid_exponent(n, j1)
    if J < j1:
        raise InvalidArgumentError(f"grid exponent {J} is below the finest level j1={j1}")
    return J


def load_series(config: RunConfig) -> TimeSeries:
    if config.input_csv is not None:
        return read_series_csv(config.input_csv)
    return simulate(config.model, config.n, config.seed)


# === Peaks ===

def local_maxima(
    g: GridFunction,
    lower: float = 0.0,
    upper: float = 1.0,
    prominence: float = PEAK_PROMINENCE,
) -> np.ndarray:
    """
    Frequencies of circular local maxima in [lower, upper) whose prominence is
    at least `prominence` times the range of g.
    """
    values = g.values
    spread = float(values.max() - values.min())
    if spread == 0.0:
        return np.empty(0)
    # one full period either side so edge peaks see their true bases
    extended = np.tile(values, 3)
    peaks, _ = signal.find_peaks(extended, prominence=prominence * spread)
    peaks = peaks - g.size
    omega = peaks[(peaks >= 0) & (peaks < g.size)] / g.size
    return omega[(omega >= lower) & (omega < upper)]


def captures_peaks(estimate: GridFunction, truth: GridFunction, tolerance: float = PEAK_TOLERANCE) -> bool:
    """Every peak of the truth has an estimate peak within `tolerance` (circular)"""
    true_peaks = local_maxima(truth)
    found = local_maxima(estimate)
    if true_peaks.size == 0 or found.size == 0:
        return False
    for peak in true_peaks:
        gap = np.abs(found - peak)
        if np.min(np.minimum(gap, 1.0 - gap)) > tolerance:
            return False
    return True


# === Baseline ===

def baseline_histogram(
    periodogram_values: GridFunction,
    dims: Sequence[int],
    truth: Optional[GridFunction] = None,
    default_m: Optional[int] = None,
) -> Tuple[GridFunction, pd.DataFrame]:
    """
    Least-squares projection of the periodogram onto m equal bins for each m.

    With a truth the L2 error of every m is tabulated and the oracle-best m is
    selected. Without one the m closest to `default_m` (or to the square root
    of the grid size) is used. The `selection` column says which rule applied.
    """
    size = periodogram_values.size
    dims = sorted({int(m) for m in dims})
    if not dims:
        raise InvalidArgumentError("baseline_histogram needs at least one dimension")
    if dims[0] < 1 or dims[-1] > size:
        raise InvalidArgumentError(f"histogram dimensions must lie in [1, {size}]")

    positions = np.arange(size)
    fits = {}
    errors = []
    for m in dims:
        bins = positions * m // size
        means = np.bincount(bins, weights=periodogram_values.values, minlength=m) / np.bincount(bins, minlength=m)
        fits[m] = GridFunction(values=means[bins])
        errors.append(l2_distance(fits[m], truth) if truth is not None else math.nan)

    if truth is not None:
        best_m = dims[int(np.argmin(errors))]
        selection = "oracle"
    else:
        target = default_m if default_m is not None else math.sqrt(size)
        best_m = min(dims, key=lambda m: (abs(m - target), m))
        selection = "dimension_match"

    table = pd.DataFrame({"m": dims, "l2": errors})
    table["selected"] = table["m"] == best_m
    table["selection"] = selection
    return fits[best_m], table


# === Pipeline ===

def _threshold_plan(
    config: RunConfig, n: int, j0: int, j1: int, psi_sup: float, I_n: GridFunction
) -> ThresholdPlan:
    if config.estimator is EstimatorType.LINEAR:
        return build_plan(ThresholdMode.LINEAR, j0, j1, n, psi_sup)
    if config.estimator is EstimatorType.HARD_ORACLE:
        f_sup, c_star = oracle_constants(_require_model(config))
        return build_plan(
            ThresholdMode.ORACLE,
            j0,
            j1,
            n,
            psi_sup,
            delta=config.delta,
            f_sup=f_sup,
            c_star=c_star,
            scale=config.threshold_scale,
        )
    est = sup_norm_estimate(I_n, n, r=config.poly_degree, kappa=config.kappa)
    return build_plan(
        ThresholdMode.DATA_DRIVEN,
        j0,
        j1,
        n,
        psi_sup,
        delta=config.delta,
        sup_norm=est,
        b_const=config.b_const,
        scale=config.threshold_scale,
    )


def estimate_spectrum(
    config: RunConfig, series: TimeSeries, telemetry: Optional[TelemetryService] = None
) -> EstimationResult:
    """Run the configured estimator on one series without touching the disk"""
    telemetry = telemetry or TelemetryService(enabled=False)
    n = series.n
    j0, j1 = resolve_levels(config, n)
    J = resolve_grid_exponent(config, n, j1)
    truth = true_spectral_density(config.model, 2 ** J) if config.model is not None else None

    with telemetry.track_stage("periodogram"):
        I_n = periodogram(series, J)

    if config.estimator is EstimatorType.BASELINE_HISTOGRAM:
        with telemetry.track_stage("histogram"):
            dims = [m for m in config.histogram_dims if m <= I_n.size]
            best, table = baseline_histogram(I_n, dims, truth=truth, default_m=2 ** j1)
        return EstimationResult(
            j0=j0,
            j1=j1,
            grid_j=J,
            periodogram=I_n,
            unconstrained=best,
            estimate=best,
            truth=truth,
            histogram_table=table,
            histogram_best_m=int(table.loc[table["selected"], "m"].iloc[0]),
        )

    basis = build_basis(config.wavelet_filter, J)
    with telemetry.track_stage("threshold"):
        coeffs = basis.analyze(I_n, j0, j1)
        plan = _threshold_plan(config, n, j0, j1, basis.psi_sup, I_n)
        kept = apply_threshold(coeffs, plan)
        unconstrained = unconstrained_estimate(coeffs, plan, basis)

    with telemetry.track_stage("projection"):
        init = init_theta(unconstrained, config.eta, j0, j1, basis)
        targets = kept.to_vector()
        certificate = existence_certificate(init, targets, basis)
        projection = project(targets, init, config.solver, basis)
        telemetry.record_projection(projection)
        estimate = eval_family(projection.theta_hat, basis)

    logger.debug(
        "Estimated spectrum",
        extra={
            "n": n,
            "j0": j0,
            "j1": j1,
            "J": J,
            "converged": projection.converged,
            "guaranteed": certificate.guaranteed,
        },
    )
    return EstimationResult(
        j0=j0,
        j1=j1,
        grid_j=J,
        periodogram=I_n,
        unconstrained=unconstrained,
        estimate=estimate,
        truth=truth,
        coefficients=kept,
        plan=plan,
        projection=projection,
        existence=certificate,
    )


def summarize_metrics(config: RunConfig, result: EstimationResult) -> MetricsSummary:
    low, high = density_range(result.estimate)
    summary = {
        "estimate_min": low,
        "estimate_max": high,
        "unconstrained_min": density_range(result.unconstrained)[0],
    }
    truth = result.truth
    if truth is None:
        return MetricsSummary(**summary)

    summary["l2"] = l2_distance(truth, result.estimate)
    if low > 0:
        summary["kl"] = kl_divergence(truth, result.estimate)
    basis = build_basis(config.wavelet_filter, result.grid_j)
    diagnostics = approx_diagnostics(truth, result.j1, basis)
    summary["d_j"] = diagnostics.d_j
    summary["gamma_j"] = diagnostics.gamma_j
    if config.smoothness is not None:
        spec = BesovSpec(s=config.smoothness, p=2.0, q=2.0)
        summary["besov"] = {
            "truth": besov_norm(basis.analyze(truth, result.j0, result.j1), spec),
            "estimate": besov_norm(basis.analyze(result.estimate, result.j0, result.j1), spec),
        }
    return MetricsSummary(**summary)


def check_covariance(config: RunConfig, result: EstimationResult) -> Tuple[CovarianceSequence, CovarianceCheck]:
    """Covariance of the estimate and the smallest Toeplitz eigenvalue"""
    max_lag = min(config.max_lag, result.estimate.size // 2 - 1)
    m = min(config.psd_dim, max_lag + 1)
    source = (
        CovarianceSource.LINEAR_ESTIMATE
        if config.estimator is EstimatorType.LINEAR
        else CovarianceSource.NONLINEAR_ESTIMATE
    )
    rho = covariance_from_estimate(result.estimate, max_lag, source)
    unconstrained_eigenvalue = None
    if result.projection is not None:
        rho_raw = covariance_from_estimate(
            result.unconstrained, max_lag, CovarianceSource.UNCONSTRAINED_ESTIMATE
        )
        unconstrained_eigenvalue = min_toeplitz_eigenvalue(rho_raw, m)
    check = CovarianceCheck(
        m=m,
        min_eigenvalue=min_toeplitz_eigenvalue(rho, m),
        positive_semidefinite=is_positive_semidefinite(rho, m),
        unconstrained_min_eigenvalue=unconstrained_eigenvalue,
    )
    return rho, check


def run_simulate(config: RunConfig) -> ArtifactService:
    """Simulate the configured model and write series.csv"""
    model = _require_model(config)
    artifacts = ArtifactService(config.out)
    artifacts.write_series("series", simulate(model, config.n, config.seed))
    return artifacts


def run_estimate(config: RunConfig, telemetry: Optional[TelemetryService] = None) -> RunReport:
    """
    Full estimation run. Artifacts are written even when the projection does
    not converge; the report carries the flag.
    """
    telemetry = telemetry or TelemetryService()
    artifacts = ArtifactService(config.out)

    with telemetry.track_stage("simulate"):
        series = load_series(config)
    result = estimate_spectrum(config, series, telemetry)

    with telemetry.track_stage("metrics"):
        metrics = summarize_metrics(config, result)
    with telemetry.track_stage("covariance"):
        rho, covariance = check_covariance(config, result)

    with telemetry.track_stage("artifacts"):
        artifacts.write_grid("periodogram", result.periodogram)
        artifacts.write_grid("unconstrained", result.unconstrained)
        artifacts.write_grid("estimate", result.estimate)
        curves = ["periodogram", "unconstrained", "estimate"]
        if result.truth is not None:
            artifacts.write_grid("truth", result.truth)
            curves.append("truth")
        if result.coefficients is not None:
            artifacts.write_frame("coefficients", coefficient_frame(result.coefficients))
        if result.histogram_table is not None:
            artifacts.write_frame("histogram", result.histogram_table)
        artifacts.write_frame("covariance", covariance_frame(rho))
        if config.gnuplot:
            artifacts.write_gnuplot(curves, title=config.estimator.value)

    report = RunReport(
        config=config,
        n=series.n,
        j0=result.j0,
        j1=result.j1,
        grid_j=result.grid_j,
        threshold_plan=result.plan,
        projection=result.projection,
        existence=result.existence,
        histogram_best_m=result.histogram_best_m,
        metrics=metrics,
        covariance=covariance,
        artifacts={**artifacts.written, "report": str(artifacts.out_dir / "report.json")},
        timings=dict(telemetry.timings),
    )
    artifacts.write_json("report", report)

    outcome = "converged" if report.succeeded else "not_converged"
    telemetry.record_run(config.estimator.value, outcome)
    log = logger.info if report.succeeded else logger.warning
    log(
        "Estimation run finished",
        extra={
            "estimator": config.estimator.value,
            "n": series.n,
            "j0": result.j0,
            "j1": result.j1,
            "outcome": outcome,
            "psd": covariance.positive_semidefinite,
        },
    )
    return report


# === Monte Carlo workers (module level so they pickle) ===

def _coefficient_replicate(task: Tuple[RunConfig, int, int, int, int]) -> Tuple[int, float]:
    config, rep, J, j, k = task
    with _quiet():
        series = simulate(config.model, config.n, replication_seed(config.seed, rep))
        I_n = periodogram(series, J)
        basis = build_basis(config.wavelet_filter, J)
        return rep, float(basis.analyze_vector(I_n.values, j, j + 1)[2 ** j + k])


def _estimate_replicate(task: Tuple[RunConfig, int]) -> dict:
    config, rep = task
    seed = replication_seed(config.seed, rep)
    with _quiet():
        series = simulate(config.model, config.n, seed)
        result = estimate_spectrum(config, series)
    converged = result.projection.converged if result.projection is not None else True
    return {
        "n": config.n,
        "rep": rep,
        "seed": seed,
        "kl": kl_divergence(result.truth, result.estimate),
        "converged": converged,
    }


def _sup_norm_replicate(task: Tuple[RunConfig, int, int]) -> Tuple[int, SupNormEstimate]:
    config, rep, J = task
    with _quiet():
        series = simulate(config.model, config.n, replication_seed(config.seed, rep))
        est = sup_norm_estimate(periodogram(series, J), config.n, r=config.poly_degree, kappa=config.kappa)
    return rep, est


def _compare_replicate(task: Tuple[RunConfig, int]) -> dict:
    config, rep = task
    seed = replication_seed(config.seed, rep)
    with _quiet():
        series = simulate(config.model, config.n, seed)
        result = estimate_spectrum(config, series)
        dims = [m for m in config.histogram_dims if m <= result.periodogram.size]
        histogram, table = baseline_histogram(result.periodogram, dims, truth=result.truth)
    return {
        "rep": rep,
        "l2_wavelet": l2_distance(result.truth, result.estimate),
        "l2_histogram": l2_distance(result.truth, histogram),
        "seed": seed,
        "histogram_m": int(table.loc[table["selected"], "m"].iloc[0]),
        "peaks_wavelet": captures_peaks(result.estimate, result.truth),
        "peaks_histogram": captures_peaks(histogram, result.truth),
        "converged": result.projection.converged,
    }


# === Studies ===

def run_deviation_study(
    config: RunConfig,
    x_values: Sequence[float],
    reps: int,
    level: Optional[int] = None,
    position: Optional[int] = None,
    workers: Optional[int] = None,
    telemetry: Optional[TelemetryService] = None,
) -> pd.DataFrame:
    """
    Exceedance frequency of |b^_{jk} - b_{jk}| over the deviation bound
    2 ||f||_inf (sqrt(x/n) + 2^{j/2} ||psi||_inf x/n) + C*/sqrt(n), against 2 e^{-x}.
    """
    model = _require_model(config)
    if reps < 1:
        raise InvalidArgumentError(f"reps must be >= 1, got {reps}")
    if any(x < 0 for x in x_values):
        raise InvalidArgumentError("x values must be >= 0")

    n = config.n
    j0, j1 = scale_levels(n, ScaleMode.ADAPTIVE)
    J = resolve_grid_exponent(config, n, j1)
    basis = build_basis(config.wavelet_filter, J)
    j = j0 if level is None else level
    if not 0 <= j < J:
        raise InvalidArgumentError(f"level {j} outside 0..{J - 1}")
    k = (2 ** j // 4) if position is None else position % 2 ** j

    truth = true_spectral_density(model, 2 ** J)
    b_true = float(basis.analyze_vector(truth.values, j, j + 1)[2 ** j + k])
    f_sup, c_star = oracle_constants(model)

    telemetry = telemetry or TelemetryService(enabled=False)
    with telemetry.track_stage("deviation_study"):
        results = _map_replications(
            _coefficient_replicate, [(config, rep, J, j, k) for rep in range(reps)], workers
        )
    telemetry.record_replications("deviation", reps)
    estimates = np.array([value for _, value in sorted(results)])
    deviations = np.abs(estimates - b_true)

    rows = []
    for x in sorted(x_values):
        threshold = 2.0 * f_sup * (
            math.sqrt(x / n) + 2.0 ** (j / 2) * basis.psi_sup * x / n
        ) + c_star / math.sqrt(n)
        bound = 2.0 * math.exp(-x)
        capped = min(bound, 1.0)
        rows.append(
            {
                "x": x,
                "empirical": float(np.mean(deviations > threshold)),
                "bound": bound,
                "threshold": threshold,
                "std_error": math.sqrt(capped * (1.0 - capped) / reps),
                "reps": reps,
                "level": j,
                "position": k,
            }
        )
    return pd.DataFrame(rows)


def run_rate_study(
    config: RunConfig,
    n_values: Sequence[int],
    reps: int,
    workers: Optional[int] = None,
    telemetry: Optional[TelemetryService] = None,
) -> Tuple[pd.DataFrame, float]:
    """Median KL (and IQR) per n plus the fitted log-log slope"""
    _require_model(config)
    if reps < 1:
        raise InvalidArgumentError(f"reps must be >= 1, got {reps}")
    n_values = sorted({int(n) for n in n_values})
    tasks = [(config.model_copy(update={"n": n}), rep) for n in n_values for rep in range(reps)]

    telemetry = telemetry or TelemetryService(enabled=False)
    with telemetry.track_stage("rate_study"):
        results = _map_replications(_estimate_replicate, tasks, workers)
    telemetry.record_replications("rate", len(tasks))

    frame = pd.DataFrame(results).sort_values(["n", "rep"])
    grouped = frame.groupby("n")
    table = pd.DataFrame(
        {
            "median_kl": grouped["kl"].median(),
            "iqr": grouped["kl"].quantile(0.75) - grouped["kl"].quantile(0.25),
            "converged_fraction": grouped["converged"].mean(),
            "reps": grouped["kl"].size(),
        }
    ).reset_index()

    slope = (
        log_log_slope(table["n"].to_numpy(), table["median_kl"].to_numpy())
        if len(table) >= 2
        else math.nan
    )
    logger.info("Rate study finished", extra={"n_values": n_values, "slope": slope})
    return table, slope


def run_sup_norm_study(
    config: RunConfig,
    reps: int,
    workers: Optional[int] = None,
    telemetry: Optional[TelemetryService] = None,
) -> Tuple[pd.DataFrame, float]:
    """Frequency of |est / ||f||_inf - 1| < b over replications"""
    model = _require_model(config)
    if reps < 1:
        raise InvalidArgumentError(f"reps must be >= 1, got {reps}")
    _, j1 = scale_levels(config.n, ScaleMode.ADAPTIVE)
    J = resolve_grid_exponent(config, config.n, j1)
    f_sup, _ = oracle_constants(model)

    telemetry = telemetry or TelemetryService(enabled=False)
    with telemetry.track_stage("sup_norm_study"):
        results = sorted(
            _map_replications(_sup_norm_replicate, [(config, rep, J) for rep in range(reps)], workers),
            key=lambda item: item[0],
        )
    telemetry.record_replications("sup_norm", reps)

    estimates = [est for _, est in results]
    values = np.array([est.value for est in estimates])
    table = pd.DataFrame(
        {
            "rep": [rep for rep, _ in results],
            "estimate": values,
            "ratio": values / f_sup,
            "J_n": [est.J_n for est in estimates],
            "in_event": [sup_norm_event(est, f_sup, config.b_const) for est in estimates],
        }
    )
    frequency = float(table["in_event"].mean())
    logger.info("Sup-norm study finished", extra={"reps": reps, "frequency": frequency})
    return table, frequency


def run_compare_study(
    config: RunConfig,
    reps: int,
    workers: Optional[int] = None,
    telemetry: Optional[TelemetryService] = None,
) -> Tuple[pd.DataFrame, dict]:
    """Wavelet projection against the oracle-m histogram baseline, seed by seed"""
    _require_model(config)
    if config.estimator not in WAVELET_ESTIMATORS:
        raise InvalidArgumentError("compare needs a wavelet estimator")
    if reps < 1:
        raise InvalidArgumentError(f"reps must be >= 1, got {reps}")

    telemetry = telemetry or TelemetryService(enabled=False)
    with telemetry.track_stage("compare_study"):
        results = _map_replications(
            _compare_replicate, [(config, rep) for rep in range(reps)], workers
        )
    telemetry.record_replications("compare", reps)

    table = pd.DataFrame(results).sort_values("rep").reset_index(drop=True)
    summary = {
        "reps": reps,
        "median_l2_wavelet": float(table["l2_wavelet"].median()),
        "median_l2_histogram": float(table["l2_histogram"].median()),
        "peaks_captured_wavelet": int(table["peaks_wavelet"].sum()),
        "peaks_captured_histogram": int(table["peaks_histogram"].sum()),
        "converged": int(table["converged"].sum()),
        "histogram_selection": "oracle",
    }
    logger.info("Comparison finished", extra=summary)
    return table, summary
