"""
Periodized orthonormal wavelet basis on [0, 1).

Coefficients of a function g sampled on the grid omega_i = i / 2^J are
identified with 2^{-J/2} times the discrete periodic wavelet transform of
the samples. The identification is exact for functions in V_J, and the
grid inner product <u, v> = 2^{-J} sum_i u_i v_i makes the sampled basis
functions orthonormal.
"""

import logging
import math
from functools import lru_cache
from typing import Dict, Literal, Optional, Tuple

import numpy as np
import pywt

from ..config import get_settings
from ..exceptions import InvalidArgumentError, UnsupportedFilterError
from ..schemas import GridFunction, WaveletCoefficients

logger = logging.getLogger(__name__)

FILTER_ALIASES: Dict[str, str] = {
    "symmlet8": "sym8",
    "haar": "haar",
}

MIN_GRID_J = 6


def _resolve_filter(filter_name: str) -> Tuple[str, np.ndarray]:
    """Map a user-facing name to PyWavelets and return the scaling filter h"""
    key = filter_name.lower()
    key = FILTER_ALIASES.get(key, key)
    try:
        wavelet = pywt.Wavelet(key)
    except ValueError as e:
        raise UnsupportedFilterError(f"Unknown wavelet filter '{filter_name}'") from e
    if not wavelet.orthogonal:
        raise UnsupportedFilterError(f"Filter '{filter_name}' is not orthogonal")

    lowpass = np.array(wavelet.rec_lo, dtype=float)
    length = lowpass.size
    for shift in range(0, length, 2):
        product = float(np.dot(lowpass[: length - shift], lowpass[shift:]))
        expected = 1.0 if shift == 0 else 0.0
        if abs(product - expected) > 1e-10:
            raise UnsupportedFilterError(
                f"Filter '{filter_name}' fails orthonormality at shift {shift}: {product:.3e}"
            )
    return key, lowpass


def _highpass(lowpass: np.ndarray) -> np.ndarray:
    """g_n = (-1)^n h_{L-1-n}"""
    signs = np.where(np.arange(lowpass.size) % 2 == 0, 1.0, -1.0)
    return signs * lowpass[::-1]


@lru_cache(maxsize=64)
def _forward_index(size: int, taps: int) -> np.ndarray:
    return np.arange(size + taps - 1) % size


@lru_cache(maxsize=64)
def _inverse_index(size: int, taps: int) -> np.ndarray:
    return np.arange(-(taps - 1), size) % size


def _analysis_step(
    approx: np.ndarray, lowpass: np.ndarray, highpass: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """One level of circular filtering and downsampling"""
    extended = approx[_forward_index(approx.size, lowpass.size)]
    coarse = np.correlate(extended, lowpass, mode="valid")[::2]
    detail = np.correlate(extended, highpass, mode="valid")[::2]
    return coarse, detail


def _synthesis_step(
    coarse: np.ndarray, detail: np.ndarray, lowpass: np.ndarray, highpass: np.ndarray
) -> np.ndarray:
    """Adjoint of _analysis_step (its inverse, the filters being orthonormal)"""
    size = 2 * coarse.size
    index = _inverse_index(size, lowpass.size)
    up_coarse = np.zeros(size)
    up_coarse[::2] = coarse
    up_detail = np.zeros(size)
    up_detail[::2] = detail
    return np.convolve(up_coarse[index], lowpass, mode="valid") + np.convolve(
        up_detail[index], highpass, mode="valid"
    )


def _reconstruct(
    a: np.ndarray,
    b: Dict[int, np.ndarray],
    j0: int,
    J: int,
    lowpass: np.ndarray,
    highpass: np.ndarray,
) -> np.ndarray:
    """Grid samples of sum a phi_{j0,k} + sum b psi_{j,k}; missing levels are zero"""
    approx = np.array(a, dtype=float)
    for level in range(j0, J):
        detail = b.get(level)
        if detail is None:
            detail = np.zeros(approx.size)
        approx = _synthesis_step(approx, detail, lowpass, highpass)
    return approx * 2.0 ** (J / 2)


@lru_cache()
def lambda_index(j0: int, j1: int) -> Tuple[Tuple[int, int], ...]:
    """
    Enumerate Lambda_{j1}: scaling indices first (tagged with level j0 - 1),
    then details by increasing (j, k).
    """
    if j0 < 0 or j0 > j1:
        raise InvalidArgumentError(f"need 0 <= j0 <= j1, got j0={j0}, j1={j1}")
    scaling = tuple((j0 - 1, k) for k in range(2 ** j0))
    details = tuple((j, k) for j in range(j0, j1) for k in range(2 ** j))
    return scaling + details


class WaveletBasis:
    """Immutable periodized MRA with cached basis samples and sup-norms"""

    def __init__(self, filter_name: str, J_grid: int, psi_sup_resolution: int = 14):
        if J_grid < MIN_GRID_J:
            raise InvalidArgumentError(f"J_grid must be >= {MIN_GRID_J}, got {J_grid}")
        self.filter_name = filter_name
        self.pywt_name, self.lowpass = _resolve_filter(filter_name)
        self.highpass = _highpass(self.lowpass)
        self.J_grid = J_grid
        self.lowpass.setflags(write=False)
        self.highpass.setflags(write=False)

        # Coarsest level at which psi_{j,0} does not wrap around the circle
        self.support_level = max(1, math.ceil(math.log2(self.lowpass.size)))
        self.phi_samples, self.psi_samples = self._mother_functions(J_grid)
        resolution = max(psi_sup_resolution, J_grid)
        if resolution == J_grid:
            phi_fine, psi_fine = self.phi_samples, self.psi_samples
        else:
            phi_fine, psi_fine = self._mother_functions(resolution)
        self.phi_sup = float(np.max(np.abs(phi_fine)))
        self.psi_sup = float(np.max(np.abs(psi_fine)))

        logger.debug(
            "Built wavelet basis",
            extra={"filter": filter_name, "J_grid": J_grid, "psi_sup": self.psi_sup},
        )

    def __repr__(self) -> str:
        return f"WaveletBasis(filter_name={self.filter_name!r}, J_grid={self.J_grid})"

    @property
    def grid_size(self) -> int:
        return 2 ** self.J_grid

    # === Discrete periodic transform ===

    def analyze(self, g: GridFunction, j0: int, j1: int) -> WaveletCoefficients:
        if g.J != self.J_grid:
            raise InvalidArgumentError(
                f"grid exponent {g.J} does not match basis grid {self.J_grid}"
            )
        if not 0 <= j0 <= j1 <= g.J:
            raise InvalidArgumentError(f"need 0 <= j0 <= j1 <= {g.J}, got j0={j0}, j1={j1}")

        approx = g.values * 2.0 ** (-g.J / 2)
        details: Dict[int, np.ndarray] = {}
        for level in range(g.J - 1, j0 - 1, -1):
            approx, detail = _analysis_step(approx, self.lowpass, self.highpass)
            if level < j1:
                details[level] = detail
        return WaveletCoefficients(j0=j0, j1=j1, a=approx, b=details)

    def synthesize(self, coeffs: WaveletCoefficients) -> GridFunction:
        if coeffs.j1 > self.J_grid:
            raise InvalidArgumentError(
                f"coefficients reach level {coeffs.j1}, beyond grid {self.J_grid}"
            )
        values = _reconstruct(
            coeffs.a, coeffs.b, coeffs.j0, self.J_grid, self.lowpass, self.highpass
        )
        return GridFunction(values=values)

    def analyze_vector(self, values: np.ndarray, j0: int, j1: int) -> np.ndarray:
        """analyze() on raw samples, flattened in lambda_index order"""
        approx = np.asarray(values, dtype=float) * 2.0 ** (-self.J_grid / 2)
        parts = []
        for level in range(self.J_grid - 1, j0 - 1, -1):
            approx, detail = _analysis_step(approx, self.lowpass, self.highpass)
            if level < j1:
                parts.append(detail)
        return np.concatenate([approx, *reversed(parts)])

    def synthesize_vector(self, vector: np.ndarray, j0: int, j1: int) -> np.ndarray:
        """synthesize() from a lambda_index-ordered vector, returning raw samples"""
        a = vector[: 2 ** j0]
        b = {j: vector[2 ** j: 2 ** (j + 1)] for j in range(j0, j1)}
        return _reconstruct(a, b, j0, self.J_grid, self.lowpass, self.highpass)

    def basis_function(self, kind: Literal["phi", "psi"], j: int, k: int) -> GridFunction:
        """Grid samples of phi_{j,k} or psi_{j,k}"""
        if kind == "phi":
            if not 0 <= j <= self.J_grid:
                raise InvalidArgumentError(f"phi level {j} outside 0..{self.J_grid}")
            a = np.zeros(2 ** j)
            a[k % 2 ** j] = 1.0
            coeffs = WaveletCoefficients(j0=j, j1=j, a=a, b={})
        elif kind == "psi":
            if not 0 <= j < self.J_grid:
                raise InvalidArgumentError(f"psi level {j} outside 0..{self.J_grid - 1}")
            b = np.zeros(2 ** j)
            b[k % 2 ** j] = 1.0
            coeffs = WaveletCoefficients(j0=j, j1=j + 1, a=np.zeros(2 ** j), b={j: b})
        else:
            raise InvalidArgumentError(f"kind must be 'phi' or 'psi', got {kind!r}")
        return self.synthesize(coeffs)

    def kernel_constant(self, j: int) -> float:
        """
        A_j = max_x sqrt(sum_k phi_{j,k}(x)^2), the smallest constant with
        ||v||_inf <= A_j ||v||_2 on V_j.
        """
        phi = self.basis_function("phi", j, 0).values
        # phi_{j,k} is phi_{j,0} shifted by k * 2^{J-j} grid points
        diagonal = (phi ** 2).reshape(2 ** j, 2 ** (self.J_grid - j)).sum(axis=0)
        return float(np.sqrt(diagonal.max()))

    def _mother_functions(self, resolution: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        Cascade: synthesize a unit coefficient at the support level on a
        2^resolution grid and rescale to the mother phi and psi, sampled on
        their support [0, L - 1].
        """
        level = self.support_level
        unit = np.zeros(2 ** level)
        unit[0] = 1.0
        phi = _reconstruct(unit, {}, level, resolution, self.lowpass, self.highpass)
        psi = _reconstruct(
            np.zeros(2 ** level), {level: unit}, level, resolution, self.lowpass, self.highpass
        )
        support = (self.lowpass.size - 1) * 2 ** (resolution - level)
        scale = 2.0 ** (-level / 2)
        return scale * phi[:support], scale * psi[:support]


def build_basis(
    filter_name: str = "symmlet8", J_grid: int = 12, psi_sup_resolution: Optional[int] = None
) -> WaveletBasis:
    """Basis for a filter on a 2^J_grid grid, cached per (filter, J_grid, resolution)"""
    if psi_sup_resolution is None:
        psi_sup_resolution = get_settings().psi_sup_resolution
    return _cached_basis(filter_name, J_grid, psi_sup_resolution)


@lru_cache(maxsize=16)
def _cached_basis(filter_name: str, J_grid: int, psi_sup_resolution: int) -> WaveletBasis:
    return WaveletBasis(filter_name, J_grid, psi_sup_resolution=psi_sup_resolution)


def analyze(g: GridFunction, j0: int, j1: int, basis: WaveletBasis) -> WaveletCoefficients:
    """Approximate <g, phi_{j0,k}> and <g, psi_{j,k}> for j0 <= j < j1"""
    return basis.analyze(g, j0, j1)


def synthesize(coeffs: WaveletCoefficients, basis: WaveletBasis) -> GridFunction:
    """Sampled partial sum sum a phi_{j0,k} + sum_{j<j1} sum_k b psi_{j,k}"""
    return basis.synthesize(coeffs)


def restrict(coeffs: WaveletCoefficients, j1: int) -> WaveletCoefficients:
    """Drop detail levels >= j1"""
    if not coeffs.j0 <= j1 <= coeffs.j1:
        raise InvalidArgumentError(f"cannot restrict levels {coeffs.j0}..{coeffs.j1} to j1={j1}")
    return WaveletCoefficients(
        j0=coeffs.j0, j1=j1, a=coeffs.a, b={j: coeffs.b[j] for j in range(coeffs.j0, j1)}
    )
