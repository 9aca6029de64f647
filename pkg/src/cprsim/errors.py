"""Exception types shared across the package."""


class CprsimError(Exception):
    """Base class for all errors raised by cprsim."""


class DomainError(CprsimError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ImpossibleOutcomeError(CprsimError):
    """A herald that can never fire: the post-selected state has zero norm."""


class PhysicalityError(CprsimError):
    """A covariance matrix fails the physicality bound beyond numerical slack."""


class DegenerateObjectiveError(CprsimError):
    """An optimizer objective is flat to within the requested tolerance."""


class NoThresholdError(CprsimError):
    """A root search found no sign change on its bracketing interval."""
