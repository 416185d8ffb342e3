"""Error hierarchy shared by every service."""

from typing import Optional


class WavespecError(Exception):
    """Base class for all wavespec errors."""

    error_code: str = "wavespec_error"


class InvalidArgumentError(WavespecError, ValueError):
    """An argument violates an operation's precondition."""

    error_code = "invalid_argument"


class NonStationaryError(InvalidArgumentError):
    """AR polynomial has a root on or inside the unit circle."""

    error_code = "nonstationary"


class UnsupportedFilterError(InvalidArgumentError):
    """Requested wavelet filter is not an orthogonal filter we know."""

    error_code = "unsupported_filter"


class DivergedParametersError(WavespecError, FloatingPointError):
    """exp(sum theta psi) overflowed somewhere on the grid."""

    error_code = "diverged_parameters"


class PreconditionError(WavespecError):
    """A numerical precondition does not hold; carries the measured gap."""

    error_code = "precondition_failed"

    def __init__(self, message: str, mismatch: Optional[float] = None):
        super().__init__(message)
        self.mismatch = mismatch


class WavespecWarning(UserWarning):
    """Recoverable condition worth surfacing (constants outside the guaranteed range, asymmetric input)."""
