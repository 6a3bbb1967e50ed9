"""Exception types raised across the package."""


class LMDualityError(Exception):
    """Base class for every error raised by this package."""


class InvalidStateError(LMDualityError, ValueError):
    """A state or parameter set violates its invariants (non-finite, wrong shape...)."""


class StepTooLargeError(LMDualityError, ValueError):
    pass


class DivergenceError(LMDualityError, ArithmeticError):
    pass


class UnsupportedModelError(LMDualityError, ValueError):
    pass


class SingularTransformError(LMDualityError, ZeroDivisionError):
    pass


class EliminationError(LMDualityError, ValueError):
    """The auxiliary coordinate of the master Lagrangian cannot be solved for."""


class DimensionMismatchError(LMDualityError, ValueError):
    pass


class TruncationError(LMDualityError, ValueError):
    """Fock truncation too small for the requested accuracy."""


class ZeroModeError(LMDualityError, ZeroDivisionError):
    """Determinant vanishes (holonomy in 2*pi*Z); ratios are undefined."""


class UndefinedPhaseError(LMDualityError, ValueError):
    """|Tr(U rho)| is too small for its argument to be meaningful."""


class ConfigError(LMDualityError, ValueError):
    pass
