"""Exception and warning types shared across the package."""


class AmbiguousMatch(ValueError):
    """A frequency has two or more candidate partners within the threshold."""


class SeparationViolated(ValueError):
    """A frequency set is less separated than the stated requirement."""


class ThresholdMismatch(ValueError):
    """A match partition was built with a different threshold than required."""


class UnmatchedFrequencies(ValueError):
    """A total matching was required but some frequencies have no partner."""


class ModelViolation(ValueError):
    """Inputs fall outside the separated-sum model class."""


class PreconditionViolated(ValueError):
    """A hypothesis of the inequality being checked does not hold."""


class DuplicateFrequency(ValueError):
    """Two columns of a Vandermonde matrix share the same torus point."""


class RankDeficient(ValueError):
    """The Hankel matrix has lower numerical rank than the model order."""


class ConvergenceFailure(RuntimeError):
    """Both the Gram path and the dense fallback failed to converge."""


class IllConditionedWarning(UserWarning):
    """Least-squares system condition number exceeds the trust limit."""
