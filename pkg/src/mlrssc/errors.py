"""Exception hierarchy shared by all modules."""


class MLRSSCError(Exception):
    """Base class for every error raised by this package."""


class MismatchedColumns(MLRSSCError, ValueError):
    pass


class NonFinite(MLRSSCError, ValueError):
    pass


class BadLabels(MLRSSCError, ValueError):
    pass


class ConfigError(MLRSSCError, ValueError):
    pass


class SvdFailure(MLRSSCError, ArithmeticError):
    pass


class SingularSystem(MLRSSCError, ArithmeticError):
    pass


class EigenFailure(MLRSSCError, ArithmeticError):
    pass


class AllZeroLambda(MLRSSCError, ValueError):
    pass


class BadK(MLRSSCError, ValueError):
    pass


class LengthMismatch(MLRSSCError, ValueError):
    pass


class DegenerateData(MLRSSCError, ValueError):
    pass


class ParseError(MLRSSCError, ValueError):
    """Malformed numeric text file; carries the path and 1-based line."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")
