"""Action variables of a single separated half-system ``K = kappa w^2 + V(z^2)``.

The level set ``K = a`` is written in symplectic polar coordinates
``w = sqrt(A) cos(theta)``, ``z = sqrt(A) sin(theta)`` so that for every angle
the radius ``A(a, theta)`` solves a scalar equation

    kappa * A * cos^2 + V(A * sin^2) = a.

The enclosed area is ``(1/2) int A dtheta`` and the action is area / 2pi.
Derivatives in ``a`` follow from implicit differentiation:

    A'  = 1 / (kappa cos^2 + V'(A sin^2) sin^2)
    A'' = -V''(A sin^2) sin^4 A'^3
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from .errors import DegenerateDenominator, QuadratureNotConverged, RootNotBracketed
from .lcseparation import barrier
from .polycore import UnivariatePoly

ROOT_TOL = 1e-13
DENOM_TOL = 1e-12
GL_ORDER = 16
MAX_PANELS = 4096
_EPS = np.finfo(float).eps


class HalfSystem:
    """One separated degree of freedom; ``a_max`` is the barrier height (or inf)."""

    def __init__(self, kappa, v: UnivariatePoly):
        self.kappa = float(kappa)
        self.v = v
        self.dv = v.deriv()
        self.ddv = self.dv.deriv()
        b = barrier(v)
        self.u_star = math.inf if b is None else b.u_star
        self.a_max = math.inf if b is None else b.v_star

    def __repr__(self):
        return f"HalfSystem(kappa={self.kappa}, v={self.v}, a_max={self.a_max})"

    def level_u(self, a: float) -> float:
        """Smallest u > 0 with V(u) = a (edge of the well in configuration space)."""
        if a <= 0:
            return 0.0
        if not a < self.a_max:
            raise RootNotBracketed(f"energy {a} is not below the barrier {self.a_max}")
        if math.isfinite(self.u_star):
            hi = self.u_star
        else:
            hi = 1.0
            while self.v(hi) <= a:
                hi *= 2.0
                if hi > 1e300:
                    raise RootNotBracketed(f"V never reaches {a}")
        return brentq(lambda u: self.v(u) - a, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=500)


@dataclass(frozen=True)
class RadialSolution:
    a: float
    theta: float
    A: float
    A1: float
    A2: float


@dataclass(frozen=True)
class ActionValue:
    I: float
    I1: float
    I2: float
    nodes: int
    achieved: float


@dataclass(frozen=True)
class ActionProfile:
    samples: tuple[tuple[float, float, float, float], ...]
    quadrature_nodes: int
    tolerance: float


def _solve_many(h: HalfSystem, a: float, theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if a < 0:
        raise RootNotBracketed(f"energy {a} < 0 is below the minimum of K")
    if a == 0:
        return np.zeros_like(theta)
    c2 = np.cos(theta) ** 2
    s2 = np.sin(theta) ** 2
    k = h.kappa
    ua = h.level_u(a)
    with np.errstate(divide="ignore"):
        hi = np.minimum(np.where(c2 > 0, a / (k * c2), np.inf), np.where(s2 > 0, ua / s2, np.inf))
    lo = np.zeros_like(hi)

    def g(x):
        return k * x * c2 + h.v(x * s2) - a

    def dg(x):
        return k * c2 + h.dv(x * s2) * s2

    ghi = g(hi)
    if np.any(ghi < -1e-12 * max(a, 1.0)) or not np.all(np.isfinite(hi)):
        raise RootNotBracketed(f"no sign change below the barrier for a = {a}")
    # linearization at the origin is a good first guess
    x = np.clip(a / dg(np.zeros_like(hi)), lo, hi)
    for _ in range(200):
        gx = g(x)
        lo = np.where(gx < 0, x, lo)
        hi = np.where(gx > 0, x, hi)
        d = dg(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = x - gx / d
        ok = (d > 0) & (newton > lo) & (newton < hi)
        x_new = np.where(ok, newton, 0.5 * (lo + hi))
        x_new = np.where(gx == 0, x, x_new)
        step = np.abs(x_new - x)
        x = x_new
        if np.all(step <= np.maximum(ROOT_TOL, 4 * _EPS * np.abs(x))):
            break
    else:
        raise RootNotBracketed(f"radial iteration did not converge for a = {a}")
    # one polishing Newton step, kept inside the bracket
    d = dg(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        polished = x - g(x) / d
    return np.where((d > 0) & (polished >= lo) & (polished <= hi), polished, x)


def _fields_many(h: HalfSystem, a: float, theta: np.ndarray):
    A = _solve_many(h, a, theta)
    c2 = np.cos(theta) ** 2
    s2 = np.sin(theta) ** 2
    u = A * s2
    denom = h.kappa * c2 + h.dv(u) * s2
    if np.any(denom <= DENOM_TOL):
        raise DegenerateDenominator(
            f"radial denominator {float(np.min(denom)):.3e} <= {DENOM_TOL} at a = {a}"
        )
    A1 = 1.0 / denom
    A2 = -h.ddv(u) * s2 * s2 * A1**3
    return A, A1, A2


def radial_solve(h: HalfSystem, a: float, theta):
    """Smallest non-negative radius on the level set at angle ``theta``."""
    out = _solve_many(h, a, np.atleast_1d(np.asarray(theta, dtype=float)))
    return float(out[0]) if np.ndim(theta) == 0 else out


def radial_derivatives(h: HalfSystem, a: float, theta: float) -> RadialSolution:
    A, A1, A2 = _fields_many(h, a, np.array([float(theta)]))
    return RadialSolution(a=a, theta=float(theta), A=float(A[0]), A1=float(A1[0]), A2=float(A2[0]))


@lru_cache(maxsize=None)
def _panel_rule(panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [0, pi/2]."""
    x, w = leggauss(GL_ORDER)
    edges = np.linspace(0.0, 0.5 * np.pi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _quarter_integrals(h: HalfSystem, a: float, panels: int) -> np.ndarray:
    nodes, weights = _panel_rule(panels)
    A, A1, A2 = _fields_many(h, a, nodes)
    # integrand depends on cos^2/sin^2 only: full circle = 4 * quarter
    return np.array([weights @ A, weights @ A1, weights @ A2]) / np.pi


def action(h: HalfSystem, a: float, rtol: float = 1e-10) -> ActionValue:
    """Action I = area/2pi with its first two energy derivatives.

    Panels are doubled until I, I' and I'' all change by at most ``rtol``
    relative between successive refinements.
    """
    if not 0 <= a < h.a_max:
        raise RootNotBracketed(f"energy {a} outside [0, {h.a_max})")
    panels = 1
    prev = _quarter_integrals(h, a, panels)
    change = math.inf
    while panels < MAX_PANELS:
        panels *= 2
        cur = _quarter_integrals(h, a, panels)
        scale = np.abs(cur)
        floor = 1e-15 * np.max(scale)
        change = float(np.max(np.abs(cur - prev) / np.maximum(scale, floor))) if np.max(scale) > 0 else 0.0
        prev = cur
        if change <= rtol:
            break
    else:
        raise QuadratureNotConverged(f"action at a = {a} with {panels} panels", change)
    I, I1, I2 = (float(v) for v in prev)
    if a == 0:
        I = 0.0
    return ActionValue(I=I, I1=I1, I2=I2, nodes=panels * GL_ORDER, achieved=change)


def action_profile(h: HalfSystem, a_values, rtol: float = 1e-10) -> ActionProfile:
    values = [action(h, float(a), rtol) for a in a_values]
    return ActionProfile(
        samples=tuple((float(a), v.I, v.I1, v.I2) for a, v in zip(a_values, values)),
        quadrature_nodes=max((v.nodes for v in values), default=0),
        tolerance=max((v.achieved for v in values), default=0.0),
    )


def star_shape_check(h: HalfSystem, a: float, n_theta: int = 256, n_radial: int = 64) -> bool:
    """Sampled test that each ray from the origin meets the level set once.

    For every sampled angle the radial function must be strictly increasing
    on ``[0, A_root]``.  Heuristic: only the sampled angles/radii are checked.
    """
    theta = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    try:
        A = _solve_many(h, a, theta)
    except RootNotBracketed:
        return False
    c2 = np.cos(theta) ** 2
    s2 = np.sin(theta) ** 2
    t = np.linspace(0.0, 1.0, n_radial)
    x = A[:, None] * t[None, :]
    slope = h.kappa * c2[:, None] + h.dv(x * s2[:, None]) * s2[:, None]
    return bool(np.all(slope > 0))
