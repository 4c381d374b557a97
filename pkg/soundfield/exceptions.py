class SoundfieldError(Exception):
    """Base class for every error raised by the toolkit."""


class DegenerateInputError(SoundfieldError, ValueError):
    """Empty, silent or non-finite data where a real signal is required."""


class GeometryError(SoundfieldError, ValueError):
    """Impossible or degenerate room / source / receiver geometry."""


class RirLengthError(GeometryError):
    def __init__(self, required_samples, given_samples):
        self.required_samples = int(required_samples)
        self.given_samples = int(given_samples)
        super().__init__(
            f"RIR length of {self.given_samples} samples is shorter than the latest "
            f"path; at least {self.required_samples} samples are required"
        )


class ConfigurationError(SoundfieldError, ValueError):
    """Invalid configuration value or an unsatisfiable request."""


class PoolExhaustedError(ConfigurationError):
    """The clip or segment pool cannot satisfy a draw."""


class SignalFormatError(SoundfieldError, ValueError):
    """Wrong channel count, sample rate or length."""


class DataIntegrityError(SoundfieldError):
    """Stored data that violates an invariant it was written with."""
