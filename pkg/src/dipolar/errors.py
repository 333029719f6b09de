class ResolutionError(RuntimeError):
    """A discretization failed its own refinement or positivity check."""


class InadmissibleInput(ValueError):
    """Input outside the range where a criterion is defined."""
