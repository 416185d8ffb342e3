"""
Pydantic Schemas for domain values, run configuration and reports
"""

import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_serializer,
    field_validator,
    model_validator,
)


def _as_array(value: Any) -> np.ndarray:
    array = np.array(value, dtype=float)
    if array.ndim != 1:
        raise ValueError("expected a one-dimensional sequence of reals")
    array.setflags(write=False)
    return array


def _is_power_of_two(size: int) -> bool:
    return size >= 1 and (size & (size - 1)) == 0


# Enums
class EstimatorType(str, Enum):
    """Estimators the pipeline can run"""
    LINEAR = "linear"
    HARD_ORACLE = "hard_oracle"
    HARD_ADAPTIVE = "hard_adaptive"
    BASELINE_HISTOGRAM = "baseline_histogram"


class ThresholdMode(str, Enum):
    """Where the per-level thresholds come from"""
    ORACLE = "oracle"
    DATA_DRIVEN = "data_driven"
    LINEAR = "linear"


class ScaleMode(str, Enum):
    """Rule used to pick (j0, j1)"""
    LINEAR = "linear"
    ADAPTIVE = "adaptive"


class CovarianceSource(str, Enum):
    """Provenance of a covariance sequence"""
    TRUE = "true"
    LINEAR_ESTIMATE = "linear_estimate"
    NONLINEAR_ESTIMATE = "nonlinear_estimate"
    UNCONSTRAINED_ESTIMATE = "unconstrained_estimate"


class ArrayModel(BaseModel):
    """Base for immutable models carrying numpy arrays"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# Process Schemas
class ArmaNoiseParams(BaseModel):
    """
    ARMA(p, q) recursion plus independent white noise:

        X_t = Y_t + c0 Z_t,
        Y_t + a_1 Y_{t-1} + ... + a_p Y_{t-p} = b_0 e_t + ... + b_q e_{t-q}
    """

    model_config = ConfigDict(frozen=True)

    ar: Tuple[float, ...] = ()
    ma: Tuple[float, ...] = (1.0,)
    noise_scale: float = Field(default=0.0, ge=0.0)
    innovation_variance: float = Field(default=1.0, gt=0.0)

    @field_validator("ma")
    @classmethod
    def validate_ma(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        """At least b_0 must be given"""
        if len(v) == 0:
            raise ValueError("ma needs at least the b_0 coefficient")
        return v

    @model_validator(mode="after")
    def validate_stationary(self) -> "ArmaNoiseParams":
        """Reject AR polynomials with roots on or inside the unit circle"""
        moduli = np.abs(self.ar_roots())
        if moduli.size and moduli.min() <= 1.0 + 1e-12:
            raise ValueError(
                f"nonstationary AR polynomial: smallest root modulus {moduli.min():.6g} <= 1"
            )
        return self

    def ar_roots(self) -> np.ndarray:
        """Roots of a(z) = 1 + a_1 z + ... + a_p z^p"""
        coefficients = np.trim_zeros(np.array((1.0, *self.ar)), "b")
        if coefficients.size <= 1:
            return np.empty(0, dtype=complex)
        # np.roots expects the highest power first
        return np.roots(coefficients[::-1])

    @property
    def ar_polynomial(self) -> np.ndarray:
        return np.array((1.0, *self.ar))

    @property
    def ma_polynomial(self) -> np.ndarray:
        return np.array(self.ma, dtype=float)

    @classmethod
    def two_peak_model(cls) -> "ArmaNoiseParams":
        """ARMA(2,2) plus noise with two moderately sharp spectral peaks"""
        return cls(ar=(0.2, 0.9), ma=(1.0, 0.0, 1.0), noise_scale=0.5)

    @classmethod
    def white_noise(cls, variance: float = 1.0) -> "ArmaNoiseParams":
        return cls(ar=(), ma=(1.0,), noise_scale=0.0, innovation_variance=variance)


class TimeSeries(ArrayModel):
    """Finite real sample path"""
    samples: np.ndarray
    seed: Optional[int] = None

    @field_validator("samples", mode="before")
    @classmethod
    def validate_samples(cls, v: Any) -> np.ndarray:
        array = _as_array(v)
        if array.size < 2:
            raise ValueError("a time series needs at least 2 samples")
        if not np.all(np.isfinite(array)):
            raise ValueError("samples must be finite")
        return array

    @field_serializer("samples")
    def serialize_samples(self, samples: np.ndarray) -> List[float]:
        return samples.tolist()

    @property
    def n(self) -> int:
        return int(self.samples.size)


# Grid Schemas
class GridFunction(ArrayModel):
    """Real function sampled at omega = i / 2^J, i = 0..2^J - 1"""
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, v: Any) -> np.ndarray:
        array = _as_array(v)
        if not _is_power_of_two(array.size):
            raise ValueError(f"grid size {array.size} is not a power of two")
        return array

    @field_serializer("values")
    def serialize_values(self, values: np.ndarray) -> List[float]:
        return values.tolist()

    @property
    def J(self) -> int:
        return int(self.values.size).bit_length() - 1

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def omega(self) -> np.ndarray:
        return np.arange(self.size) / self.size

    def integral(self) -> float:
        """Rectangle rule on [0, 1)"""
        return float(self.values.mean())


# Wavelet Schemas
class WaveletCoefficients(ArrayModel):
    """Scaling coefficients at j0 and details for levels j0..j1-1"""
    j0: int = Field(..., ge=0)
    j1: int = Field(..., ge=0)
    a: np.ndarray
    b: Dict[int, np.ndarray] = Field(default_factory=dict)

    @field_validator("a", mode="before")
    @classmethod
    def validate_a(cls, v: Any) -> np.ndarray:
        return _as_array(v)

    @field_validator("b", mode="before")
    @classmethod
    def validate_b(cls, v: Any) -> Dict[int, np.ndarray]:
        return {int(level): _as_array(values) for level, values in dict(v).items()}

    @model_validator(mode="after")
    def validate_shapes(self) -> "WaveletCoefficients":
        if self.j0 > self.j1:
            raise ValueError(f"j0={self.j0} exceeds j1={self.j1}")
        if self.a.size != 2 ** self.j0:
            raise ValueError(f"expected {2 ** self.j0} scaling coefficients, got {self.a.size}")
        if sorted(self.b) != list(range(self.j0, self.j1)):
            raise ValueError(f"detail levels must be exactly {self.j0}..{self.j1 - 1}")
        for level, details in self.b.items():
            if details.size != 2 ** level:
                raise ValueError(f"level {level} needs {2 ** level} details, got {details.size}")
        return self

    @field_serializer("a")
    def serialize_a(self, a: np.ndarray) -> List[float]:
        return a.tolist()

    @field_serializer("b")
    def serialize_b(self, b: Dict[int, np.ndarray]) -> Dict[int, List[float]]:
        return {level: values.tolist() for level, values in b.items()}

    def to_vector(self) -> np.ndarray:
        """Flatten in lambda_index order: scaling first, then details by (j, k)"""
        return np.concatenate([self.a, *(self.b[j] for j in range(self.j0, self.j1))])

    @classmethod
    def from_vector(cls, vector: np.ndarray, j0: int, j1: int) -> "WaveletCoefficients":
        vector = np.asarray(vector, dtype=float)
        if vector.size != 2 ** j1:
            raise ValueError(f"expected {2 ** j1} entries for j1={j1}, got {vector.size}")
        a = vector[: 2 ** j0]
        b = {j: vector[2 ** j: 2 ** (j + 1)] for j in range(j0, j1)}
        return cls(j0=j0, j1=j1, a=a, b=b)


# Threshold Schemas
class SupNormEstimate(BaseModel):
    """Sup-norm of the piecewise-polynomial projection of the periodogram"""

    model_config = ConfigDict(frozen=True)

    value: float = Field(..., ge=0.0)
    r: int = Field(..., ge=0)
    J_n: int = Field(..., ge=0)
    N_n: int = Field(..., ge=1)
    kappa: float = Field(..., gt=0.0)


class ThresholdPlan(BaseModel):
    """Per-level hard thresholds plus the constants that produced them"""

    model_config = ConfigDict(frozen=True)

    mode: ThresholdMode
    per_level: Dict[int, float]
    scale: float = Field(default=1.0, gt=0.0)
    delta: float = Field(..., ge=0.0)
    b_const: Optional[float] = None
    c_star: Optional[float] = None
    f_sup: float = Field(..., ge=0.0)
    sup_norm: Optional[SupNormEstimate] = None
    assumptions: List[str] = Field(default_factory=list)

    @field_validator("per_level")
    @classmethod
    def validate_per_level(cls, v: Dict[int, float]) -> Dict[int, float]:
        levels = sorted(v)
        values = [v[j] for j in levels]
        if any(value < 0 for value in values):
            raise ValueError("thresholds must be non-negative")
        if any(later < earlier for earlier, later in zip(values, values[1:])):
            raise ValueError("thresholds must be nondecreasing in the level")
        return {int(j): float(v[j]) for j in levels}


# Projection Schemas
class ExpFamilyParams(ArrayModel):
    """theta over Lambda_{j1}, stored in lambda_index order"""
    theta: np.ndarray
    j0: int = Field(..., ge=0)
    j1: int = Field(..., ge=0)

    @field_validator("theta", mode="before")
    @classmethod
    def validate_theta(cls, v: Any) -> np.ndarray:
        array = _as_array(v)
        if not np.all(np.isfinite(array)):
            raise ValueError("theta entries must be finite")
        return array

    @model_validator(mode="after")
    def validate_size(self) -> "ExpFamilyParams":
        if self.j0 > self.j1:
            raise ValueError(f"j0={self.j0} exceeds j1={self.j1}")
        if self.theta.size != 2 ** self.j1:
            raise ValueError(f"theta needs {2 ** self.j1} entries, got {self.theta.size}")
        return self

    @field_serializer("theta")
    def serialize_theta(self, theta: np.ndarray) -> List[Tuple[int, int, float]]:
        from .services.wavelet_service import lambda_index

        return [
            (level, k, float(value))
            for (level, k), value in zip(lambda_index(self.j0, self.j1), theta)
        ]

    @classmethod
    def zeros(cls, j0: int, j1: int) -> "ExpFamilyParams":
        return cls(theta=np.zeros(2 ** j1), j0=j0, j1=j1)

    def as_mapping(self) -> Dict[Tuple[int, int], float]:
        from .services.wavelet_service import lambda_index

        return dict(zip(lambda_index(self.j0, self.j1), self.theta.tolist()))


class SolverOptions(BaseModel):
    """Gradient descent settings for the information projection"""

    model_config = ConfigDict(frozen=True)

    tol: float = Field(default=1e-6, gt=0.0)
    max_iters: int = Field(default=50000, ge=1)
    initial_step: float = Field(default=0.1, gt=0.0)
    step_growth: float = Field(default=1.2, ge=1.0)
    step_cap: float = Field(default=10.0, gt=0.0)
    min_step: float = Field(default=1e-16, gt=0.0)
    trace_every: int = Field(default=1, ge=1)


class ProjectionReport(BaseModel):
    """Outcome of one information projection"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    theta_hat: ExpFamilyParams
    residual_norm: float
    iterations: int
    converged: bool
    objective_trace: List[float] = Field(default_factory=list)
    stop_reason: str = ""
    tol: float = 1e-6

    @model_validator(mode="after")
    def validate_convergence_flag(self) -> "ProjectionReport":
        if self.converged and self.residual_norm > self.tol:
            raise ValueError("a converged report must have residual_norm <= tol")
        return self


class ExistenceCertificate(BaseModel):
    """Computable sufficient condition for the projection to exist near theta0"""

    model_config = ConfigDict(frozen=True)

    distance: float
    radius: float
    guaranteed: bool
    b_factor: float
    a_j1: float
    theta_bound: float
    log_ratio_bound: float
    kl_bound: float


# Metric Schemas
class BesovSpec(BaseModel):
    """Besov ball B^s_{p,q}(M); p and q may be math.inf"""

    model_config = ConfigDict(frozen=True)

    s: float
    p: float = Field(..., ge=1.0)
    q: float = Field(..., ge=1.0)
    M: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def validate_smoothness(self) -> "BesovSpec":
        if self.s_star < 0:
            raise ValueError(f"s + 1/2 - 1/p must be >= 0, got {self.s_star:.6g}")
        return self

    @property
    def s_star(self) -> float:
        return self.s + 0.5 - (0.0 if math.isinf(self.p) else 1.0 / self.p)


class ApproxDiagnostics(BaseModel):
    """Projection error onto V_j and the sup/L2 constant of V_j"""

    model_config = ConfigDict(frozen=True)

    j: int
    d_j: float
    gamma_j: float
    a_j: float


class CovarianceSequence(ArrayModel):
    """Covariances for lags 0..H"""
    rho: np.ndarray
    source: CovarianceSource = CovarianceSource.TRUE

    @field_validator("rho", mode="before")
    @classmethod
    def validate_rho(cls, v: Any) -> np.ndarray:
        array = _as_array(v)
        if array.size < 1:
            raise ValueError("covariance sequence is empty")
        return array

    @model_validator(mode="after")
    def validate_bounded_by_variance(self) -> "CovarianceSequence":
        # An unconstrained spectral estimate can go negative, so its
        # covariance is allowed to break the bound.
        if self.source is not CovarianceSource.UNCONSTRAINED_ESTIMATE:
            if np.any(np.abs(self.rho) > self.rho[0] + 1e-9):
                raise ValueError("|rho(h)| must not exceed rho(0)")
        return self

    @field_serializer("rho")
    def serialize_rho(self, rho: np.ndarray) -> List[float]:
        return rho.tolist()

    @property
    def max_lag(self) -> int:
        return int(self.rho.size) - 1


# Run Schemas
class RunConfig(BaseModel):
    """Everything needed to reproduce one estimation run"""

    model_config = ConfigDict(frozen=True)

    model: Optional[ArmaNoiseParams] = None
    input_csv: Optional[Path] = None
    n: int = Field(default=1024, ge=2)
    seed: int = Field(default=0, ge=0)
    estimator: EstimatorType = EstimatorType.HARD_ADAPTIVE
    smoothness: Optional[float] = None
    grid_j: Optional[int] = Field(default=None, ge=6, le=20)
    wavelet_filter: str = "symmlet8"
    delta: float = Field(default=6.0, ge=0.0)
    b_const: float = 0.841
    threshold_scale: float = Field(default=1.0, gt=0.0)
    kappa: float = Field(default=1.0 / 36.0, gt=0.0)
    poly_degree: int = Field(default=0, ge=0)
    eta: float = Field(default=1e-4, gt=0.0)
    solver: SolverOptions = Field(default_factory=SolverOptions)
    histogram_dims: List[int] = Field(default_factory=lambda: list(range(1, 101)))
    max_lag: int = Field(default=128, ge=0)
    psd_dim: int = Field(default=128, ge=1)
    out: Path = Path("runs")
    gnuplot: bool = False

    @model_validator(mode="after")
    def validate_consistency(self) -> "RunConfig":
        if (self.model is None) == (self.input_csv is None):
            raise ValueError("give exactly one of model or input_csv")
        if self.estimator is EstimatorType.HARD_ORACLE and self.model is None:
            raise ValueError("hard_oracle needs a known model for ||f||_inf and C*")
        if self.estimator is EstimatorType.LINEAR:
            if self.smoothness is None or self.smoothness <= 0.5:
                raise ValueError("linear estimator needs smoothness s > 1/2")
        if self.psd_dim > self.max_lag + 1:
            raise ValueError("psd_dim cannot exceed max_lag + 1")
        return self

    @property
    def has_truth(self) -> bool:
        return self.model is not None


class MetricsSummary(BaseModel):
    """Quality figures against the true density when it is known"""
    kl: Optional[float] = None
    l2: Optional[float] = None
    besov: Optional[Dict[str, float]] = None
    d_j: Optional[float] = None
    gamma_j: Optional[float] = None
    estimate_min: float
    estimate_max: float
    unconstrained_min: Optional[float] = None


class CovarianceCheck(BaseModel):
    """Bochner check of the estimated covariance"""
    m: int
    min_eigenvalue: float
    positive_semidefinite: bool
    unconstrained_min_eigenvalue: Optional[float] = None


class RunReport(BaseModel):
    """Everything a run produced"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: RunConfig
    n: int
    j0: int
    j1: int
    grid_j: int
    threshold_plan: Optional[ThresholdPlan] = None
    projection: Optional[ProjectionReport] = None
    existence: Optional[ExistenceCertificate] = None
    histogram_best_m: Optional[int] = None
    metrics: MetricsSummary
    covariance: CovarianceCheck
    artifacts: Dict[str, str] = Field(default_factory=dict)
    timings: Dict[str, float] = Field(default_factory=dict)

    @property
    def succeeded(self) -> bool:
        return self.projection is None or self.projection.converged
