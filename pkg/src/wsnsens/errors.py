"""Exception hierarchy shared by the simulator, profiler and analysis code."""


class WsnError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(WsnError, ValueError):
    """A configuration, arena, cost model or parameter space is invalid."""


class DatasetParseError(WsnError, ValueError):
    """A dataset or report file could not be parsed.

    Attributes:
        line: 1-based line number of the offending line, if known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DatasetIntegrityError(WsnError, ValueError):
    """A dataset is well-formed line by line but inconsistent as a whole."""


class DegenerateInputError(WsnError, ValueError):
    """A statistic is undefined for the given input (constant series)."""


class InsufficientDataError(WsnError, ValueError):
    """Too few samples for the requested statistic."""
