"""Exception hierarchy.

Every error raised for a well-formed but mathematically impossible request
derives from :class:`DomainError`; the CLI maps those to exit code 1.
"""


class DomainError(Exception):
    """A request that cannot be honoured; ``certificate`` explains why."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class DepthError(DomainError):
    pass


class OverlapError(DomainError):
    pass


class ObstructionError(DomainError):
    """Kraft sums differ while the measure is the invariant one (lambda = 1/2)."""


class NotConjugateError(DomainError):
    pass


class TypeMismatchError(DomainError):
    pass


class BudgetError(DomainError):
    """The exact object would be too large to materialize."""
