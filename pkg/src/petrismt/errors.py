"""Exception types shared across the toolkit.

Everything a user can trigger with bad input derives from `DomainError`,
which the command line maps to exit code 1.
"""


class DomainError(Exception):
    pass


class NetError(DomainError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NetSyntaxError(NetError):
    pass


class DuplicateIdentifier(NetError):
    pass


class UnknownPlaceInArc(NetError):
    pass


class EmptyNet(NetError):
    pass


class NotSafe(DomainError):
    pass


class StateLimitExceeded(DomainError):
    pass


class BudgetExceeded(DomainError):
    pass


class WidthOverflow(DomainError):
    pass


class SExprSyntaxError(DomainError):
    pass


class SortError(DomainError):
    pass


class SpawnFailure(DomainError):
    pass


class UnparsableModel(DomainError):
    pass


class MissingVariable(DomainError):
    pass


class ValueOutOfRange(DomainError):
    pass


class ConflictDetected(DomainError):
    pass


class InvalidPartition(DomainError):
    pass


class SolverInconclusive(DomainError):
    pass
