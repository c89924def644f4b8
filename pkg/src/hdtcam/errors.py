"""Exception types shared across the package."""


class HdtcamError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(HdtcamError, ValueError):
    """Operands do not share the same hypervector dimension."""


class DegenerateInputError(HdtcamError, ValueError):
    """Input is structurally valid but carries no usable signal (e.g. all-black image)."""


class FormatError(HdtcamError, ValueError):
    """A file does not conform to its declared format.

    ``location`` names the offending byte offset or row number when known.
    """

    def __init__(self, message, location=None):
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)
        self.location = location


class ConfigError(HdtcamError, ValueError):
    """Invalid or incomplete configuration (missing table entry, bad key, ...)."""


class InvalidStateError(HdtcamError, RuntimeError):
    """Operation called on an object in a state that cannot support it."""


class NoFeasiblePointError(HdtcamError, LookupError):
    """A selection over design points found nothing within the given budget."""
