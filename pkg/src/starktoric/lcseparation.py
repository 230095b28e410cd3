"""Concrete Stark-type systems and their Levi-Civita separation.

A planar potential ``V(q) = -m/|q| - G(q1, q2)`` on the energy level
``H = -f`` is pulled back by ``q = z^2`` and the time change ``|z|^2``.
When the pullback of ``G`` splits as ``G1(z1) + G2(z2)`` the regularized
Hamiltonian becomes a sum of two one-degree-of-freedom systems

    K_i = kappa * w_i^2 + V_i(z_i^2),   V_i(u) = f*u - G_i(sqrt(u)),

and the level ``K = m`` is studied.  The raw kinetic term ``|w|^2/8`` is
rescaled (``w -> w/2``) to ``kappa = 1/2``; both actions then change by the
same positive factor, which leaves every convexity verdict intact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from scipy.optimize import brentq

from .errors import InvalidParameter, MultipleCriticalPoints, NoCriticalValues
from .polycore import (
    BivariatePoly,
    UnivariatePoly,
    as_fraction,
    ck_table,
    family_form,
    lc_pullback,
    split_separable,
)

KINDS = ("kepler", "stark", "frozen-hill", "generalized", "custom")
KAPPA = Fraction(1, 2)


@dataclass(frozen=True)
class PolynomialPotential:
    m: Fraction
    G: BivariatePoly
    label: str
    g: Fraction | None = None
    n: int | None = None

    def __call__(self, q1: float, q2: float) -> float:
        return -float(self.m) / (q1 * q1 + q2 * q2) ** 0.5 - float(self.G(q1, q2))


@dataclass(frozen=True)
class SeparatedSystem:
    kappa: Fraction
    v1: UnivariatePoly
    v2: UnivariatePoly
    f: Fraction
    m_level: Fraction
    potential: PolynomialPotential | None = None

    @property
    def halves(self) -> tuple[UnivariatePoly, UnivariatePoly]:
        return self.v1, self.v2


@dataclass(frozen=True)
class CriticalData:
    e1: float
    e2: float
    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class Barrier:
    u_star: float
    v_star: float


class EnergyRegime(enum.Enum):
    BELOW_FIRST_CRITICAL = "below-first-critical"
    ABOVE_FIRST_CRITICAL = "above-first-critical"
    NO_CRITICAL_VALUES = "no-critical-values"
    NOT_APPLICABLE = "not-applicable"


def _positive(name: str, value) -> Fraction:
    if value is None:
        raise InvalidParameter(f"{name} is required")
    x = as_fraction(value)
    if x <= 0:
        raise InvalidParameter(f"{name} must be > 0, got {value}")
    return x


def _nonzero(name: str, value) -> Fraction:
    if value is None:
        raise InvalidParameter(f"{name} is required")
    x = as_fraction(value)
    if x == 0:
        raise InvalidParameter(f"{name} must be != 0")
    return x


def build_system(
    kind: str,
    m,
    g=None,
    n: int | None = None,
    G: BivariatePoly | None = None,
) -> PolynomialPotential:
    """Build the configuration potential of one of the supported families.

    ``frozen-hill`` is ``G = g (q1^2 + q2^2/4)``; ``generalized`` uses the
    C_k table, ``G = g * sum_k C_k/4^k q1^(2n-2k) q2^(2k)``.
    """
    if kind not in KINDS:
        raise InvalidParameter(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    m = _positive("m", m)
    if kind == "kepler":
        return PolynomialPotential(m=m, G=BivariatePoly(), label=kind)
    if kind == "custom":
        if G is None:
            raise InvalidParameter("custom kind requires a polynomial G")
        return PolynomialPotential(m=m, G=G, label=kind)
    g = _nonzero("g", g)
    if kind == "stark":
        return PolynomialPotential(m=m, G=BivariatePoly({(1, 0): g}), label=kind, g=g)
    if kind == "frozen-hill":
        G = BivariatePoly({(2, 0): g, (0, 2): g / 4})
        return PolynomialPotential(m=m, G=G, label=kind, g=g, n=1)
    if n is None or isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidParameter(f"n must be an integer >= 1, got {n!r}")
    G = family_form(n, ck_table(n)) * g
    return PolynomialPotential(m=m, G=G, label=kind, g=g, n=n)


def _to_u(p: UnivariatePoly, which: int) -> UnivariatePoly:
    odd = [e for e, c in enumerate(p.coeffs) if c and e % 2]
    if odd:
        raise InvalidParameter(f"separated part G{which} has odd power z^{odd[0]}")
    return UnivariatePoly(p.coeffs[::2])


def separate(potential: PolynomialPotential, f) -> SeparatedSystem:
    """Regularize and split; raises NotSeparable for non-Stark-type G."""
    f = _positive("f", f)
    g1, g2 = split_separable(lc_pullback(potential.G))
    fu = UnivariatePoly([0, f])
    return SeparatedSystem(
        kappa=KAPPA,
        v1=fu - _to_u(g1, 1),
        v2=fu - _to_u(g2, 2),
        f=f,
        m_level=potential.m,
        potential=potential,
    )


def critical_values(n: int, m, g) -> CriticalData:
    """Closed-form critical points and values of the generalized potential."""
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    m = float(_positive("m", m))
    g = float(g)
    if g <= 0:
        raise NoCriticalValues(f"no critical values for g = {g} <= 0")
    p = 1.0 / (2 * n + 1)
    x = (m / (2 * n * g)) ** p
    y = (2 ** (2 * n - 1) * m / (n * g)) ** p
    e1 = -(2 * n + 1) * (m / (2 * n)) ** (2 * n * p) * g**p
    e2 = -(2 * n + 1) * (m / (4 * n)) ** (2 * n * p) * g**p
    return CriticalData(e1=e1, e2=e2, points=((x, 0.0), (-x, 0.0), (0.0, y), (0.0, -y)))


def barrier(V: UnivariatePoly) -> Barrier | None:
    """Unique interior maximum of ``V`` on ``u > 0``, or ``None`` if V increases."""
    if V(Fraction(0)) != 0:
        raise InvalidParameter("barrier() expects V(0) = 0")
    dV = V.deriv()
    lowest = next((c for c in dV.coeffs if c != 0), Fraction(0))
    if lowest <= 0:
        raise MultipleCriticalPoints("V is not increasing near u = 0: the origin is not a minimum")
    roots = dV.count_positive_roots()
    if roots == 0:
        return None
    if roots > 1 or dV.leading > 0:
        raise MultipleCriticalPoints(
            f"V' has {roots} distinct positive root(s) with leading sign "
            f"{'+' if dV.leading > 0 else '-'}; outside the supported family"
        )
    lead = abs(dV.leading)
    hi = 1.0 + max(float(abs(c) / lead) for c in dV.coeffs[:-1])
    u = brentq(dV, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
    return Barrier(u_star=u, v_star=float(V(u)))


def classify_energy(system: SeparatedSystem, potential: PolynomialPotential | None = None) -> EnergyRegime:
    """Position of the energy level ``-f`` relative to the first critical value."""
    potential = potential or system.potential
    if potential is None or potential.label in ("stark", "custom"):
        return EnergyRegime.NOT_APPLICABLE
    if potential.label == "kepler" or potential.g < 0:
        return EnergyRegime.NO_CRITICAL_VALUES
    crit = critical_values(potential.n, potential.m, potential.g)
    if -float(system.f) < crit.e1:
        return EnergyRegime.BELOW_FIRST_CRITICAL
    return EnergyRegime.ABOVE_FIRST_CRITICAL


def admissible_energy(V: UnivariatePoly) -> float:
    """Largest half-system energy with a compact level set (barrier height or inf)."""
    b = barrier(V)
    return float("inf") if b is None else b.v_star
