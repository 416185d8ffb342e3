"""
Spectral estimates to covariance sequences, and the Bochner (PSD) check.
"""

import logging
import warnings
from typing import Sequence, Union

import numpy as np
from scipy import linalg

from ..exceptions import InvalidArgumentError, WavespecWarning
from ..schemas import CovarianceSequence, CovarianceSource, GridFunction

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-6
PSD_TOLERANCE = 1e-8


def spectral_to_covariance(
    f: GridFunction,
    max_lag: int,
    source: CovarianceSource = CovarianceSource.NONLINEAR_ESTIMATE,
) -> CovarianceSequence:
    """rho(h) = 2 pi * integral f(omega) e^{-i 2 pi omega h} d omega for h = 0..max_lag"""
    if not 0 <= max_lag < f.size // 2:
        raise InvalidArgumentError(f"max_lag must be in [0, {f.size // 2 - 1}], got {max_lag}")

    mirrored = np.roll(f.values[::-1], 1)
    asymmetry = float(np.max(np.abs(f.values - mirrored)))
    if asymmetry > SYMMETRY_TOLERANCE:
        message = f"spectral input is not symmetric about 1/2 (gap {asymmetry:.3e}); keeping the real part"
        logger.warning(message, extra={"asymmetry": asymmetry})
        warnings.warn(message, WavespecWarning, stacklevel=2)

    rho = 2 * np.pi * np.fft.fft(f.values)[: max_lag + 1] / f.size
    return CovarianceSequence(rho=rho.real, source=source)


def min_toeplitz_eigenvalue(
    rho: Union[CovarianceSequence, Sequence[float]], m: int
) -> float:
    """Smallest eigenvalue of the m x m matrix [rho(|i - i'|)]"""
    values = rho.rho if isinstance(rho, CovarianceSequence) else np.asarray(rho, dtype=float)
    if not 1 <= m <= values.size:
        raise InvalidArgumentError(f"m must be in [1, {values.size}], got {m}")
    matrix = linalg.toeplitz(values[:m])
    return float(linalg.eigvalsh(matrix, subset_by_index=[0, 0])[0])


def is_positive_semidefinite(
    rho: Union[CovarianceSequence, Sequence[float]], m: int, tol: float = PSD_TOLERANCE
) -> bool:
    return min_toeplitz_eigenvalue(rho, m) >= -tol


def symmetrized(f: GridFunction) -> GridFunction:
    """(f(omega) + f(1 - omega)) / 2; same covariance as the real part of f's"""
    mirrored = np.roll(f.values[::-1], 1)
    return GridFunction(values=0.5 * (f.values + mirrored))


def covariance_from_estimate(
    f: GridFunction,
    max_lag: int,
    source: CovarianceSource = CovarianceSource.NONLINEAR_ESTIMATE,
) -> CovarianceSequence:
    """Covariance of a spectral estimate, symmetrized first and tagged with its source"""
    return spectral_to_covariance(symmetrized(f), max_lag, source)
