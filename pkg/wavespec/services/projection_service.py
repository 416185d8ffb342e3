"""
Wavelet exponential family f_theta = exp(sum_{Lambda_{j1}} theta_{jk} psi_{jk}) and
the information projection solved as least squares on the coefficient residual.

With c(theta) = analyze(f_theta) restricted to Lambda_{j1}, the objective is
G(theta) = ||c(theta) - targets||^2 and its gradient is

    grad G = 2 J^T r,   J_{lambda mu} = <f_theta psi_mu, psi_lambda>,

which the transform evaluates as 2 * analyze(f_theta * synthesize(r)).
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from ..exceptions import DivergedParametersError, InvalidArgumentError
from ..schemas import (
    ExistenceCertificate,
    ExpFamilyParams,
    GridFunction,
    ProjectionReport,
    SolverOptions,
)
from .wavelet_service import WaveletBasis

logger = logging.getLogger(__name__)

# exp() overflows float64 just above 709.78
LOG_OVERFLOW = 709.0
PROGRESS_EVERY = 5000


def _check_levels(params: ExpFamilyParams, basis: WaveletBasis) -> None:
    if params.j1 > basis.J_grid:
        raise InvalidArgumentError(
            f"family level j1={params.j1} exceeds the basis grid {basis.J_grid}"
        )


def _density(theta: np.ndarray, j0: int, j1: int, basis: WaveletBasis) -> np.ndarray:
    log_density = basis.synthesize_vector(theta, j0, j1)
    peak = float(np.max(log_density))
    if not math.isfinite(peak) or peak > LOG_OVERFLOW:
        raise DivergedParametersError(f"sum theta psi reaches {peak:.4g}; exp would overflow")
    return np.exp(log_density)


def eval_family(params: ExpFamilyParams, basis: WaveletBasis) -> GridFunction:
    """Samples of exp(synthesize(theta)); strictly positive"""
    _check_levels(params, basis)
    return GridFunction(values=_density(params.theta, params.j0, params.j1, basis))


def coefficient_map(params: ExpFamilyParams, basis: WaveletBasis) -> np.ndarray:
    """<f_theta, psi_{jk}> for (j, k) in Lambda_{j1}, in lambda_index order"""
    _check_levels(params, basis)
    density = _density(params.theta, params.j0, params.j1, basis)
    return basis.analyze_vector(density, params.j0, params.j1)


def gradient(params: ExpFamilyParams, targets: np.ndarray, basis: WaveletBasis) -> np.ndarray:
    """Analytic gradient of G at theta"""
    _check_levels(params, basis)
    j0, j1 = params.j0, params.j1
    density = _density(params.theta, j0, j1, basis)
    residual = basis.analyze_vector(density, j0, j1) - targets
    return 2.0 * basis.analyze_vector(density * basis.synthesize_vector(residual, j0, j1), j0, j1)


def objective(params: ExpFamilyParams, targets: np.ndarray, basis: WaveletBasis) -> float:
    residual = coefficient_map(params, basis) - targets
    return float(residual @ residual)


class _Problem:
    """Caches density and residual at the current iterate"""

    def __init__(self, targets: np.ndarray, j0: int, j1: int, basis: WaveletBasis):
        self.targets = targets
        self.j0, self.j1 = j0, j1
        self.basis = basis

    def evaluate(self, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
        density = _density(theta, self.j0, self.j1, self.basis)
        residual = self.basis.analyze_vector(density, self.j0, self.j1) - self.targets
        return density, residual, float(residual @ residual)

    def gradient(self, density: np.ndarray, residual: np.ndarray) -> np.ndarray:
        weighted = density * self.basis.synthesize_vector(residual, self.j0, self.j1)
        return 2.0 * self.basis.analyze_vector(weighted, self.j0, self.j1)


def project(
    targets: np.ndarray,
    init: ExpFamilyParams,
    opts: Optional[SolverOptions] = None,
    basis: Optional[WaveletBasis] = None,
) -> ProjectionReport:
    """
    Gradient descent on G with an adaptive step: halve on an objective
    increase (or overflow), grow by opts.step_growth up to opts.step_cap on
    acceptance. Stops when sqrt(G) <= opts.tol, after opts.max_iters accepted
    steps, or when the step falls below opts.min_step.
    """
    if basis is None:
        raise InvalidArgumentError("project needs the wavelet basis the family lives on")
    opts = opts or SolverOptions()
    targets = np.asarray(targets, dtype=float)
    if targets.size != init.theta.size:
        raise InvalidArgumentError(
            f"targets have {targets.size} entries, Lambda_{{j1}} has {init.theta.size}"
        )
    if not np.all(np.isfinite(targets)):
        raise InvalidArgumentError("targets must be finite")
    _check_levels(init, basis)

    problem = _Problem(targets, init.j0, init.j1, basis)
    theta = np.array(init.theta, dtype=float)
    density, residual, value = problem.evaluate(theta)
    trace = [value]
    step = opts.initial_step
    iterations = 0
    stop_reason = "max_iters"

    while True:
        if math.sqrt(value) <= opts.tol:
            stop_reason = "tolerance"
            break
        if iterations >= opts.max_iters:
            break

        direction = problem.gradient(density, residual)
        accepted = False
        while step >= opts.min_step:
            candidate = theta - step * direction
            try:
                cand_density, cand_residual, cand_value = problem.evaluate(candidate)
            except DivergedParametersError:
                cand_value = math.inf
            if cand_value < value:
                accepted = True
                break
            step *= 0.5

        if not accepted:
            stop_reason = "step_underflow"
            break

        theta, density, residual, value = candidate, cand_density, cand_residual, cand_value
        iterations += 1
        step = min(step * opts.step_growth, opts.step_cap)
        if iterations % opts.trace_every == 0:
            trace.append(value)
        if iterations % PROGRESS_EVERY == 0:
            logger.debug(
                "Projection progress",
                extra={"iterations": iterations, "residual": math.sqrt(value), "step": step},
            )

    if trace[-1] != value:
        trace.append(value)
    residual_norm = math.sqrt(value)
    converged = residual_norm <= opts.tol
    log = logger.info if converged else logger.warning
    log(
        "Information projection finished",
        extra={
            "converged": converged,
            "iterations": iterations,
            "residual": residual_norm,
            "stop_reason": stop_reason,
        },
    )
    return ProjectionReport(
        theta_hat=ExpFamilyParams(theta=theta, j0=init.j0, j1=init.j1),
        residual_norm=residual_norm,
        iterations=iterations,
        converged=converged,
        objective_trace=trace,
        stop_reason=stop_reason,
        tol=opts.tol,
    )


def init_theta(
    unconstrained: GridFunction, eta: float, j0: int, j1: int, basis: WaveletBasis
) -> ExpFamilyParams:
    """theta_0 = <log(max(f, eta)), psi_{jk}> over Lambda_{j1}"""
    if eta <= 0:
        raise InvalidArgumentError(f"eta must be > 0, got {eta}")
    clipped = np.maximum(unconstrained.values, eta)
    return ExpFamilyParams(theta=basis.analyze_vector(np.log(clipped), j0, j1), j0=j0, j1=j1)


def existence_certificate(
    theta0: ExpFamilyParams, targets: np.ndarray, basis: WaveletBasis
) -> ExistenceCertificate:
    """
    Sufficient condition for a family member matching `targets` near theta0:
    ||targets - beta0|| <= 1 / (2 e b A_{j1}) with b = exp(||log f_{theta0}||_inf).
    When it holds, ||theta - theta0|| <= 2 e b d, ||log(f0 / f)||_inf <= 2 e b A_{j1} d
    and KL(f0; f) <= 2 e b d^2, d being the target distance.
    """
    beta0 = coefficient_map(theta0, basis)
    distance = float(np.linalg.norm(np.asarray(targets, dtype=float) - beta0))
    log_sup = float(np.max(np.abs(basis.synthesize_vector(theta0.theta, theta0.j0, theta0.j1))))
    b_factor = math.exp(log_sup)
    a_j1 = basis.kernel_constant(theta0.j1)
    radius = 1.0 / (2.0 * math.e * b_factor * a_j1)
    return ExistenceCertificate(
        distance=distance,
        radius=radius,
        guaranteed=distance <= radius,
        b_factor=b_factor,
        a_j1=a_j1,
        theta_bound=2.0 * math.e * b_factor * distance,
        log_ratio_bound=2.0 * math.e * b_factor * a_j1 * distance,
        kl_bound=2.0 * math.e * b_factor * distance ** 2,
    )
