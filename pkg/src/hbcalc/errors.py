"""Exception and warning classes raised by hbcalc."""


class HbError(Exception):
    """Base class for all domain errors raised by this package."""

    #: short machine-readable tag, used by the command line runner
    code = "domain"


class InputError(HbError, ValueError):
    code = "input"


class PairMismatchError(InputError):
    code = "pair-mismatch"


class DegreeOverflowError(HbError):
    """A product or shift would need more Fourier modes than the truncation keeps."""

    code = "degree-overflow"


class ConditioningError(HbError):
    """A point is too close to the unit circle for the configured resolution."""

    code = "conditioning"


class LogIntegrabilityError(HbError):
    code = "log-integrability"


class NotNonExtremeError(HbError):
    """The symbol looks like an extreme point: 1 - |b| vanishes on most of the circle."""

    code = "not-non-extreme"


class NotInHbError(HbError):
    code = "not-in-hb"


class SingularityError(HbError):
    code = "singularity"


class DegenerateSymbolError(HbError):
    code = "degenerate-symbol"


class DivergenceError(HbError):
    code = "divergence"


class InvariantError(HbError):
    code = "invariant"


class ConditioningWarning(UserWarning):
    pass


class IllConditionedSpanWarning(UserWarning):
    pass
