"""
Mean-corrected periodogram on a dyadic frequency grid and the bias constant C*.
"""

import logging
import math
import warnings
from typing import Optional, Sequence

import numpy as np

from ..exceptions import InvalidArgumentError, WavespecWarning
from ..schemas import GridFunction, TimeSeries
from .wavelet_service import MIN_GRID_J

logger = logging.getLogger(__name__)


def default_grid_exponent(n: int, j1: Optional[int] = None) -> int:
    """J = max(ceil(log2 n), j1 + 4), never below the smallest basis grid"""
    exponent = math.ceil(math.log2(n))
    if j1 is not None:
        exponent = max(exponent, j1 + 4)
    return max(exponent, MIN_GRID_J)


def periodogram(series: TimeSeries, J: int) -> GridFunction:
    """
    I_n(omega) = |sum_t (X_t - mean) e^{i 2 pi omega t}|^2 / (2 pi n) at omega = i / 2^J.

    Samples are folded modulo 2^J before the transform, which evaluates the
    defining sum exactly at every grid point even when 2^J < n.
    """
    n = series.n
    if n < 2:
        raise InvalidArgumentError(f"periodogram needs n >= 2, got {n}")
    if J < 1:
        raise InvalidArgumentError(f"grid exponent must be >= 1, got {J}")
    size = 2 ** J
    if size < n:
        message = f"grid 2^{J}={size} is smaller than n={n}; Parseval will not hold"
        logger.warning(message, extra={"n": n, "J": J})
        warnings.warn(message, WavespecWarning, stacklevel=2)

    centered = series.samples - series.samples.mean()
    folded = np.bincount(np.arange(n) % size, weights=centered, minlength=size)
    half = np.abs(np.fft.rfft(folded)) ** 2 / (2 * np.pi * n)
    # Mirror the half spectrum so I(omega) = I(1 - omega) holds bit for bit
    values = np.concatenate([half, half[-2:0:-1]])
    return GridFunction(values=np.maximum(values, 0.0))


def bias_constant(rho: Sequence[float]) -> float:
    """
    C* = sqrt((C2 + 39 C1^2) / (4 pi^2)), with C1 = sum |rho(h)| and
    C2 = sum |h| rho(h)^2 over h in -H..H (rho(-h) = rho(h)).
    """
    rho = np.asarray(rho, dtype=float)
    if rho.size == 0:
        raise InvalidArgumentError("bias_constant needs at least rho(0)")
    lags = np.arange(rho.size)
    c1 = abs(rho[0]) + 2.0 * np.abs(rho[1:]).sum()
    c2 = 2.0 * float(np.sum(lags[1:] * rho[1:] ** 2))
    return math.sqrt((c2 + 39.0 * c1 ** 2) / (4.0 * math.pi ** 2))
