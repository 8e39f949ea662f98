class PurelabError(Exception):
    pass


class ValidationError(PurelabError, ValueError):
    """An input object violates its type invariants."""


class DomainError(PurelabError, ValueError):
    """A scalar argument lies outside the domain of the operation."""


class BoundViolationError(PurelabError):
    """A simulated channel beat a proven purity bound.

    Raising this means either a bug or a counterexample to the theorem, so
    callers should treat it as fatal.
    """

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class NonConvergenceError(PurelabError):
    def __init__(self, message, trajectory=()):
        super().__init__(message)
        self.trajectory = list(trajectory)
