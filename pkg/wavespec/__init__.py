"""
wavespec: strictly positive spectral density estimation by hard-thresholded
wavelet coefficients and information projection onto a wavelet exponential
family.
"""

from .config import Settings, get_settings
from .exceptions import (
    DivergedParametersError,
    InvalidArgumentError,
    NonStationaryError,
    PreconditionError,
    UnsupportedFilterError,
    WavespecError,
    WavespecWarning,
)
from .schemas import (
    ArmaNoiseParams,
    EstimatorType,
    ExpFamilyParams,
    GridFunction,
    RunConfig,
    RunReport,
    TimeSeries,
    WaveletCoefficients,
)

__version__ = "1.0.0"

__all__ = [
    "ArmaNoiseParams",
    "DivergedParametersError",
    "EstimatorType",
    "ExpFamilyParams",
    "GridFunction",
    "InvalidArgumentError",
    "NonStationaryError",
    "PreconditionError",
    "RunConfig",
    "RunReport",
    "Settings",
    "TimeSeries",
    "UnsupportedFilterError",
    "WaveletCoefficients",
    "WavespecError",
    "WavespecWarning",
    "get_settings",
]
