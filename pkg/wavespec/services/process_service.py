"""
Gaussian ARMA-plus-noise sequences: simulation and exact second-order structure.

Frequency convention: omega in [0, 1) with kernel e^{i 2 pi omega h}, and

    f(omega) = (1 / 2 pi) sum_h rho(h) e^{i 2 pi omega h},

so rho(h) = 2 pi * integral_0^1 f(omega) e^{-i 2 pi omega h} d omega.
"""

import logging
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import signal

from ..config import get_settings
from ..exceptions import InvalidArgumentError, NonStationaryError
from ..schemas import ArmaNoiseParams, GridFunction, TimeSeries

logger = logging.getLogger(__name__)

IMAGINARY_TOLERANCE = 1e-10


def ensure_stationary(params: ArmaNoiseParams) -> None:
    """Re-check stationarity (covers instances built with model_construct)"""
    moduli = np.abs(params.ar_roots())
    if moduli.size and moduli.min() <= 1.0 + 1e-12:
        raise NonStationaryError(
            f"AR polynomial has a root of modulus {moduli.min():.6g}; process is not stationary"
        )


def simulate(
    params: ArmaNoiseParams, n: int, seed: int, burn_in: Optional[int] = None
) -> TimeSeries:
    """
    X_t = Y_t + c0 Z_t with Y driven through the ARMA recursion by Gaussian
    innovations; a burn-in prefix is generated and discarded.
    """
    if n < 2:
        raise InvalidArgumentError(f"n must be >= 2, got {n}")
    ensure_stationary(params)
    if burn_in is None:
        burn_in = get_settings().burn_in

    rng = np.random.default_rng(seed)
    total = n + burn_in
    innovations = rng.standard_normal(total) * np.sqrt(params.innovation_variance)
    noise = rng.standard_normal(total)

    arma = signal.lfilter(params.ma_polynomial, params.ar_polynomial, innovations)
    samples = arma + params.noise_scale * noise
    return TimeSeries(samples=samples[burn_in:], seed=seed)


def _check_dyadic(grid_size: int) -> None:
    if grid_size < 2 or grid_size & (grid_size - 1):
        raise InvalidArgumentError(f"grid_size must be a power of two >= 2, got {grid_size}")


def spectral_values(params: ArmaNoiseParams, omega: np.ndarray) -> np.ndarray:
    """f(omega) = sigma^2 |b(e^{i2pi w})|^2 / (2 pi |a(e^{i2pi w})|^2) + c0^2 / (2 pi)"""
    z = np.exp(2j * np.pi * np.asarray(omega, dtype=float))
    transfer = np.abs(P.polyval(z, params.ma_polynomial)) ** 2 / np.abs(
        P.polyval(z, params.ar_polynomial)
    ) ** 2
    return (params.innovation_variance * transfer + params.noise_scale ** 2) / (2 * np.pi)


def true_spectral_density(params: ArmaNoiseParams, grid_size: int) -> GridFunction:
    """Spectral density sampled at omega = i / grid_size"""
    ensure_stationary(params)
    _check_dyadic(grid_size)
    omega = np.arange(grid_size) / grid_size
    return GridFunction(values=spectral_values(params, omega))


def true_covariance(
    params: ArmaNoiseParams, max_lag: int, quadrature_j: Optional[int] = None
) -> np.ndarray:
    """rho(0..max_lag) by rectangle-rule quadrature of the spectral density"""
    if max_lag < 0:
        raise InvalidArgumentError(f"max_lag must be >= 0, got {max_lag}")
    if quadrature_j is None:
        quadrature_j = get_settings().covariance_quadrature_j
    grid_size = 2 ** quadrature_j
    if max_lag >= grid_size // 2:
        raise InvalidArgumentError(f"max_lag {max_lag} too large for a 2^{quadrature_j} grid")

    density = true_spectral_density(params, grid_size).values
    rho = 2 * np.pi * np.fft.fft(density)[: max_lag + 1] / grid_size
    residue = float(np.max(np.abs(rho.imag)))
    if residue > IMAGINARY_TOLERANCE:
        logger.warning("Covariance quadrature left an imaginary residue", extra={"residue": residue})
    return rho.real.copy()


def sample_autocovariance(series: TimeSeries, max_lag: int) -> np.ndarray:
    """Biased, mean-removed sample autocovariance for lags 0..max_lag"""
    if not 0 <= max_lag < series.n:
        raise InvalidArgumentError(f"max_lag must be in [0, {series.n - 1}], got {max_lag}")
    centered = series.samples - series.samples.mean()
    size = 1 << int(2 * series.n - 1).bit_length()
    spectrum = np.abs(np.fft.rfft(centered, size)) ** 2
    return np.fft.irfft(spectrum, size)[: max_lag + 1] / series.n
