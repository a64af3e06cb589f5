"""Exception hierarchy shared by all stages."""


class AlgDomainError(Exception):
    """Base class for every error raised by the package."""


class SolveError(AlgDomainError):
    """Dense boundary-integral solve failed or is too ill-conditioned."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class KernelAmbiguityError(AlgDomainError):
    """The TGPT null space is not numerically one-dimensional."""

    def __init__(self, message, gap_ratio=None, singular_values=None):
        super().__init__(message)
        self.gap_ratio = gap_ratio
        self.singular_values = singular_values


class NotAlgebraicError(AlgDomainError):
    """No degree up to the scan limit produces a vanishing polynomial."""


class LevelSetError(AlgDomainError):
    """A point could not be placed on the zero set, or a search diverged."""


class CircuitLimitError(AlgDomainError):
    """Elementary circuit enumeration exceeded its cap."""


class StageError(AlgDomainError):
    """Wraps an error raised inside one pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
