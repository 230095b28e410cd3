"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class StarkToricError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(StarkToricError, ValueError):
    """A parameter is outside its admissible range."""


class NotSeparable(StarkToricError):
    """The Levi-Civita pullback contains a mixed monomial z1^i z2^j (i, j > 0)."""

    def __init__(self, monomial: tuple[int, int], coefficient=None):
        self.monomial = monomial
        self.coefficient = coefficient
        e1, e2 = monomial
        super().__init__(
            f"pullback is not separable: mixed monomial z1^{e1}*z2^{e2}"
            + (f" with coefficient {coefficient}" if coefficient is not None else "")
        )


class NoCriticalValues(StarkToricError):
    """The configuration potential has no critical points (g <= 0)."""


class MultipleCriticalPoints(StarkToricError):
    """V' has more than one positive root, or a degenerate one."""


class NoBoundedComponent(StarkToricError):
    """The regularized energy level has no compact component to analyse."""


class UnboundedRegion(StarkToricError):
    """No finite bounding box exists for a sublevel set."""


class NumericalError(StarkToricError):
    """Base for failures of the floating-point engines."""


class RootNotBracketed(NumericalError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class QuadratureNotConverged(NumericalError):
    def __init__(self, message: str, achieved: float):
        self.achieved = achieved
        super().__init__(f"{message} (achieved relative change {achieved:.3e})")
