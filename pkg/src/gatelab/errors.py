"""Exception types shared across the package."""


class GatelabError(Exception):
    """Base class for all package-specific errors."""


class UnstableSystemError(GatelabError):
    """Queue offered load is at or above capacity (lambda >= mu)."""


class DegenerateInputError(GatelabError):
    """A rate or duration that must be strictly positive is not."""


class UnknownDecisionError(GatelabError, KeyError):
    """A choice record references a decision not on the experiment grid."""


class IdentificationError(GatelabError):
    """A free parameter has no supporting treatment records in the data."""


class FixedPointDivergenceError(GatelabError):
    """The announced-wait fixed point did not converge within the iteration cap."""


class IncompleteSetError(GatelabError):
    """A (subject, decision-set) group does not contain the full 11 decisions."""


class DegenerateSampleError(GatelabError):
    """A statistical test was given too few values or zero variance."""
