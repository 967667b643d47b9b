"""Exception hierarchy shared by all csfs modules."""


class CSFSError(Exception):
    """Base class for every error raised by csfs."""


class DataError(CSFSError, ValueError):
    """Invalid dataset, malformed input file, or impossible split."""


class ParseError(DataError):
    """A CSV or manifest line could not be parsed.

    Attributes:
        line: 1-based line number of the offending line (None when unknown).
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class LabelDomainError(DataError):
    """A label value outside {-1, +1} (or the {0, 1} alias)."""


class UndefinedMeasureError(CSFSError, ValueError):
    """An F-measure whose denominator is not strictly positive."""


class CostDomainError(CSFSError, ValueError):
    """A cost-generating value that would produce negative costs."""


class NumericalError(CSFSError, ArithmeticError):
    """The solver produced non-finite values or hit a singular system.

    Attributes:
        trace: objective values recorded before the failure, if any.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class SweepError(CSFSError):
    """Every value of the sweep failed to produce a usable model."""
