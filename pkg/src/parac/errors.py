"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures to
distinct process exit statuses.
"""


class ParacError(Exception):
    exit_code = 1


class ValidationError(ParacError, ValueError):
    exit_code = 2

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class AsymmetricInput(ValidationError):
    pass


class PositiveOffDiagonal(ValidationError):
    pass


class RowSumViolation(ValidationError):
    pass


class NotAPermutation(ValidationError):
    exit_code = 3


class DimensionMismatch(ParacError, ValueError):
    exit_code = 4


class TooLargeForDense(ParacError):
    exit_code = 5


class TooManyNeighbors(ParacError):
    exit_code = 5


class DenseBlowup(ParacError):
    exit_code = 6


class BudgetExceeded(ParacError):
    exit_code = 6


class ParseError(ParacError):
    exit_code = 7

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedField(ParseError):
    pass


class ArenaExhausted(ParacError):
    exit_code = 8

    def __init__(self, offset, vertex, requested, budget):
        super().__init__(
            f"arena exhausted at offset {offset} while reserving {requested} "
            f"entries for vertex {vertex} (budget {budget})"
        )
        self.offset = offset
        self.vertex = vertex
        self.requested = requested
        self.budget = budget


class WorkspaceFull(ParacError):
    exit_code = 9


class QueueStall(ParacError):
    exit_code = 10


class NotConnected(ParacError):
    exit_code = 11


class MaxItersExceeded(ParacError):
    exit_code = 12

    def __init__(self, report):
        super().__init__(
            f"no convergence after {report.iterations} iterations "
            f"(relative residual {report.relative_residual:.3e})"
        )
        self.report = report
