"""
Estimation quality: Kullback-Leibler divergence, distances, Besov norms,
approximation diagnostics and the Pythagorean identity of the projection.
"""

import logging
import math
from typing import Tuple

import numpy as np

from ..exceptions import InvalidArgumentError, PreconditionError
from ..schemas import (
    ApproxDiagnostics,
    BesovSpec,
    ExpFamilyParams,
    GridFunction,
    WaveletCoefficients,
)
from .projection_service import coefficient_map, eval_family
from .wavelet_service import WaveletBasis

logger = logging.getLogger(__name__)


def _check_same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.size != g.size:
        raise InvalidArgumentError(f"grids differ: {f.size} vs {g.size} points")


def kl_divergence(f: GridFunction, g: GridFunction) -> float:
    """
    Delta(f; g) = integral f log(f / g) - f + g, by the rectangle rule.
    Points with f = 0 contribute g.
    """
    _check_same_grid(f, g)
    if np.any(g.values <= 0):
        raise InvalidArgumentError("second argument of the KL divergence must be > 0")
    if np.any(f.values < 0):
        raise InvalidArgumentError("first argument of the KL divergence must be >= 0")

    positive = f.values > 0
    terms = np.array(g.values, dtype=float)
    fp, gp = f.values[positive], g.values[positive]
    terms[positive] = fp * np.log(fp / gp) - fp + gp
    return float(terms.mean())


def l2_distance(f: GridFunction, g: GridFunction) -> float:
    _check_same_grid(f, g)
    return float(np.sqrt(np.mean((f.values - g.values) ** 2)))


def sup_distance(f: GridFunction, g: GridFunction) -> float:
    _check_same_grid(f, g)
    return float(np.max(np.abs(f.values - g.values)))


def density_range(f: GridFunction) -> Tuple[float, float]:
    return float(f.values.min()), float(f.values.max())


def besov_norm(coeffs: WaveletCoefficients, spec: BesovSpec) -> float:
    """
    (sum_k |a_{j0,k}|^p)^{1/p} + (sum_j 2^{j s* q} (sum_k |b_{jk}|^p)^{q/p})^{1/q}
    over the available levels; sums become maxima for p or q infinite.
    """
    scaling_part = float(np.linalg.norm(coeffs.a, ord=spec.p))
    level_norms = np.array(
        [
            2.0 ** (j * spec.s_star) * np.linalg.norm(coeffs.b[j], ord=spec.p)
            for j in range(coeffs.j0, coeffs.j1)
        ]
    )
    detail_part = float(np.linalg.norm(level_norms, ord=spec.q)) if level_norms.size else 0.0
    return scaling_part + detail_part


def kernel_diagonal_constant(j: int, basis: WaveletBasis) -> float:
    """A_j, the sup of sqrt(sum_k phi_{j,k}^2); bounds ||v||_inf by A_j ||v||_2 on V_j"""
    if not 0 <= j <= basis.J_grid:
        raise InvalidArgumentError(f"level {j} outside 0..{basis.J_grid}")
    return basis.kernel_constant(j)


def approx_diagnostics(g: GridFunction, j: int, basis: WaveletBasis) -> ApproxDiagnostics:
    """D_j = ||g - g_j||_2, gamma_j = ||g - g_j||_inf with g_j the projection onto V_j"""
    if not 0 <= j <= g.J:
        raise InvalidArgumentError(f"level {j} outside 0..{g.J}")
    projected = basis.synthesize(basis.analyze(g, j, j))
    difference = g.values - projected.values
    return ApproxDiagnostics(
        j=j,
        d_j=float(np.sqrt(np.mean(difference ** 2))),
        gamma_j=float(np.max(np.abs(difference))),
        a_j=kernel_diagonal_constant(j, basis),
    )


def pythagoras_residual(
    f: GridFunction,
    theta_star: ExpFamilyParams,
    theta: ExpFamilyParams,
    basis: WaveletBasis,
    tol: float = 1e-6,
) -> float:
    """
    |Delta(f; f_theta) - Delta(f; f_theta*) - Delta(f_theta*; f_theta)|, valid
    when f_theta* matches the coefficients of f on Lambda_{j1}.
    """
    target = basis.analyze_vector(f.values, theta_star.j0, theta_star.j1)
    mismatch = float(np.linalg.norm(coefficient_map(theta_star, basis) - target))
    if mismatch > tol:
        raise PreconditionError(
            f"f_theta* misses the coefficients of f by {mismatch:.3e} (> {tol:g})",
            mismatch=mismatch,
        )

    f_star = eval_family(theta_star, basis)
    f_theta = eval_family(theta, basis)
    residual = kl_divergence(f, f_theta) - kl_divergence(f, f_star) - kl_divergence(f_star, f_theta)
    logger.debug("Pythagorean residual", extra={"residual": residual, "mismatch": mismatch})
    return abs(residual)


def log_log_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log y against log x"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.any(x <= 0) or np.any(y <= 0):
        raise InvalidArgumentError("slope needs at least two positive points")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope) if math.isfinite(slope) else math.nan
