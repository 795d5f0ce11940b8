"""Exception hierarchy shared by all modules."""


class OstbcRelayError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(OstbcRelayError, ValueError):
    pass


class Singular(OstbcRelayError, ArithmeticError):
    pass


class DimensionMismatch(OstbcRelayError, ValueError):
    pass


class DomainError(OstbcRelayError, ValueError):
    """Argument outside the domain of a special function."""


class CrossCheckFailure(OstbcRelayError, ArithmeticError):
    """Two independent evaluation routes of the same quantity disagree."""


class Unsupported(OstbcRelayError, ValueError):
    """The requested result is only defined for a narrower configuration."""


class SearchSpaceTooLarge(OstbcRelayError, ValueError):
    pass


class InsufficientData(OstbcRelayError, ValueError):
    pass


class ConfigError(OstbcRelayError, ValueError):
    """Invalid campaign specification.

    ``line`` and ``field`` locate the offending entry when known.
    """

    def __init__(self, message, *, field=None, line=None, path=None):
        self.field = field
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
