"""Exception hierarchy.

Every error carries enough context to be printed as a one-line CLI message.
"""

from __future__ import annotations


class GraphError(Exception):
    """Base class for all package errors."""


class ValidationError(GraphError):
    pass


class NotSimple(ValidationError):
    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(f"self-loop at vertex {vertex}")


class NotSymmetric(ValidationError):
    def __init__(self, u: int, v: int):
        self.pair = (u, v)
        super().__init__(f"adjacency not symmetric at ({u}, {v})")


class NotRegular(ValidationError):
    def __init__(self, vertex: int, degree: int, expected: int):
        self.vertex = vertex
        self.degree = degree
        self.expected = expected
        super().__init__(f"vertex {vertex} has degree {degree}, expected {expected}")


class NotBipartite(ValidationError):
    def __init__(self, witness: list[int] | None = None, reason: str | None = None):
        self.witness = witness
        if reason is None:
            reason = f"odd cycle {witness}" if witness else "no valid two-coloring"
        super().__init__(reason)


class InfeasibleDegree(GraphError):
    pass


class BudgetExceeded(GraphError):
    """Work or retry budget ran out (CLI exit code 3)."""


class RetryBudgetExceeded(BudgetExceeded):
    pass


class CapExceeded(BudgetExceeded):
    """Matrix dimension above the configured cap."""


DimensionCapExceeded = CapExceeded


class NotConverged(GraphError):
    pass


class LengthMismatch(GraphError):
    pass


class SizeMismatch(GraphError):
    pass


class IndexOutOfRange(GraphError):
    pass


class InvalidEntry(GraphError):
    pass


class PreconditionViolated(GraphError):
    pass


class PremiseNotMet(GraphError):
    pass
