"""Exception and warning types shared across the package."""


class TruncationError(RuntimeError):
    """Probability or amplitude leaked past the Fock cutoff beyond tolerance."""


class TruncationWarning(UserWarning):
    """Tail mass past the cutoff is no longer negligible."""


class ZeroProbabilityError(ValueError):
    """The requested conditioning outcome has vanishing probability."""


class ZeroMeanError(ValueError):
    """Photon statistics that divide by the mean are undefined for vacuum."""


class DegenerateCouplerError(ValueError):
    """The coupler has no usable coupling for the requested construction."""


class DegenerateTargetError(ValueError):
    """The target state has a numerically vanishing leading Fock amplitude."""


class UnreachableThresholdError(ValueError):
    """The detection threshold can never be crossed for these loop parameters."""


class CoefficientOverflowError(OverflowError):
    """An intermediate ordering coefficient exceeded the floating-point guard."""


class ConfigError(ValueError):
    """A configuration file or command-line value violates the schema."""
