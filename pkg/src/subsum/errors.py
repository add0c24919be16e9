"""Exception types shared across the engine."""


class SubsumError(Exception):
    """Base class for engine errors."""


class DatabaseFormatError(SubsumError, ValueError):
    """The analysis-database file could not be parsed or has the wrong shape."""


class DatabaseValidationError(SubsumError, ValueError):
    """A structurally valid file violates a data invariant.

    ``field`` names the first violated invariant, e.g.
    ``frames[3].labels.scene[1]``.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class EmptyGroundSetError(SubsumError, ValueError):
    """A ground set would contain no items."""


class EmptyQueryResultError(SubsumError, LookupError):
    """A query matched nothing; distinct from a malformed request."""


class IncompatibleRequestError(SubsumError, ValueError):
    """Summary mode, objective and constraint cannot be combined."""


class UnknownDatabaseError(SubsumError, KeyError):
    """The requested database id is not registered with the service."""
