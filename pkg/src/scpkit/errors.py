"""Exception types shared across the package."""


class ScpError(Exception):
    """Base class for all scpkit errors."""


class InvalidArgumentError(ScpError, ValueError):
    """Caller supplied inconsistent or out-of-contract arguments."""


class NumericFailureError(ScpError, RuntimeError):
    """A numerical routine broke down after its retry budget."""


class ResourceExhaustedError(ScpError, RuntimeError):
    """A solve exceeded its node or size budget."""


class UnsupportedProblemError(ScpError, RuntimeError):
    """Problem declares a structure the engine has no solver for."""


class ParseError(ScpError, ValueError):
    """Malformed input file; message carries the offending line number."""
