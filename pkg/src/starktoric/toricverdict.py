"""Moment-map curve I2(I1) and the concave/convex toric-domain verdict.

With energies ``a + b = m`` split between the two halves, write
``h_i`` for the inverse of the action map ``I_i(.)``.  Then

    dI2/dI1   = -h1'(I1) / h2'(I2)
    d2I2/dI1^2 = -(h1'' h2'^2 + h1'^2 h2'') / h2'^3

with ``h' = 1/I'`` and ``h'' = -I''/I'^3``.  A concave toric domain is the
region under a non-increasing *convex* graph, so ``Concave`` corresponds to a
positive second derivative of I2 in I1, ``Convex`` to a negative one.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .actionengine import HalfSystem, action
from .errors import NoBoundedComponent
from .lcseparation import SeparatedSystem
from .polycore import UnivariatePoly


class Kind(enum.Enum):
    CONCAVE = "concave"
    CONVEX = "convex"
    INDETERMINATE = "indeterminate"


class Method(enum.Enum):
    CRITERION3 = "Criterion 3"
    CURVE_CURVATURE = "curve curvature"
    BOTH = "Criterion 3 + curve curvature"


# ---------------------------------------------------------------------------
# Criterion 3: signs of V' and V'' on the swept configuration range


@dataclass(frozen=True)
class HalfSigns:
    u_max: float
    dv: str
    ddv: str


@dataclass(frozen=True)
class Criterion3Report:
    halves: tuple[HalfSigns, HalfSigns]
    kind: Kind

    def table(self) -> list[str]:
        rows = ["half  u-range            V'   V''"]
        for i, hs in enumerate(self.halves, 1):
            rows.append(f"{i:>4}  (0, {hs.u_max:.10g}]{'':<3} {hs.dv:>3} {hs.ddv:>4}")
        return rows


def _sign_on(p: UnivariatePoly, hi: float) -> str:
    """'+', '-', '0' (identically zero) or 'mixed' on the open interval (0, hi)."""
    if p.is_zero():
        return "0"
    top = Fraction(hi)
    inside = p.count_roots(0, top)
    if p(top) == 0:
        inside -= 1
    if inside:
        return "mixed"
    return "+" if p(top / 2) > 0 else "-"


def _u_extent(h: HalfSystem, m: float) -> float:
    if m < h.a_max:
        return h.level_u(m)
    return h.u_star * (1 - 1e-12)


def criterion3(system: SeparatedSystem) -> Criterion3Report:
    """Sufficient sign test on the potentials of both halves.

    ``V' > 0, V'' < 0`` on both halves gives I'' > 0 for both actions and a
    concave toric domain; ``V' > 0, V'' > 0`` gives a convex one.
    """
    m = float(system.m_level)
    halves = []
    for v in system.halves:
        h = HalfSystem(system.kappa, v)
        u_max = _u_extent(h, m)
        halves.append(HalfSigns(u_max=u_max, dv=_sign_on(h.dv, u_max), ddv=_sign_on(h.ddv, u_max)))
    kind = Kind.INDETERMINATE
    if all(hs.dv == "+" for hs in halves):
        if all(hs.ddv == "-" for hs in halves):
            kind = Kind.CONCAVE
        elif all(hs.ddv == "+" for hs in halves):
            kind = Kind.CONVEX
    return Criterion3Report(halves=tuple(halves), kind=kind)


# ---------------------------------------------------------------------------
# Moment-map curve


@dataclass(frozen=True)
class CurveSample:
    a: Fraction
    b: Fraction
    I1: float
    I2: float
    slope: float
    curvature: float
    dI1_da: float
    d2I1_da2: float
    dI2_db: float
    d2I2_db2: float


@dataclass(frozen=True)
class MomentMapCurve:
    samples: tuple[CurveSample, ...]
    m_level: Fraction
    margin: float

    @property
    def curvatures(self) -> list[float]:
        return [s.curvature for s in self.samples]

    @property
    def slopes(self) -> list[float]:
        return [s.slope for s in self.samples]


def energy_grid(lo: float, hi: float, n: int, spacing: str = "chebyshev") -> list[float]:
    if n < 2:
        raise ValueError("need at least two samples")
    if spacing == "chebyshev":
        t = [(1 - math.cos(math.pi * j / (n - 1))) / 2 for j in range(n)]
    elif spacing == "uniform":
        t = [j / (n - 1) for j in range(n)]
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    return [lo + (hi - lo) * tj for tj in t]


def _curve_point(h1: HalfSystem, h2: HalfSystem, a: Fraction, b: Fraction, rtol: float) -> CurveSample:
    p = action(h1, float(a), rtol)
    q = action(h2, float(b), rtol)
    d1, dd1 = 1.0 / p.I1, -p.I2 / p.I1**3
    d2, dd2 = 1.0 / q.I1, -q.I2 / q.I1**3
    return CurveSample(
        a=a,
        b=b,
        I1=p.I,
        I2=q.I,
        slope=-d1 / d2,
        curvature=-(dd1 * d2 * d2 + d1 * d1 * dd2) / d2**3,
        dI1_da=p.I1,
        d2I1_da2=p.I2,
        dI2_db=q.I1,
        d2I2_db2=q.I2,
    )


def admissible_range(system: SeparatedSystem, margin: float = 1e-3) -> tuple[float, float]:
    """Energy window for half 1 that keeps both halves off their barriers."""
    m = float(system.m_level)
    h1 = HalfSystem(system.kappa, system.v1)
    h2 = HalfSystem(system.kappa, system.v2)
    for i, h in enumerate((h1, h2), 1):
        if not m < h.a_max:
            raise NoBoundedComponent(
                f"half-system {i}: barrier height {h.a_max:.10g} <= m = {m:.10g} "
                "(energy above first critical value)"
            )
    lo = max(margin * m, m - (1 - margin) * h2.a_max)
    hi = min((1 - margin) * m, (1 - margin) * h1.a_max)
    if not lo < hi:
        raise NoBoundedComponent(f"empty admissible energy window [{lo}, {hi}]")
    return lo, hi


def moment_curve(
    system: SeparatedSystem,
    n_samples: int = 65,
    margin: float = 1e-3,
    spacing: str = "chebyshev",
    rtol: float = 1e-10,
    threads: int = 1,
) -> MomentMapCurve:
    """Sample the curve (I1(a), I2(m - a)) with its slope and curvature.

    ``a`` is stored as an exact rational and ``b = m - a`` is formed exactly.
    Samples are computed independently (optionally on a thread pool) and
    assembled in grid order.
    """
    lo, hi = admissible_range(system, margin)
    h1 = HalfSystem(system.kappa, system.v1)
    h2 = HalfSystem(system.kappa, system.v2)
    m = system.m_level
    a_grid = [Fraction(x) for x in energy_grid(lo, hi, n_samples, spacing)]
    pairs = [(a, m - a) for a in a_grid]

    def work(pair):
        return _curve_point(h1, h2, pair[0], pair[1], rtol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(work, pairs))
    else:
        samples = [work(p) for p in pairs]
    return MomentMapCurve(samples=tuple(samples), m_level=m, margin=margin)


def curve_kind(curve: MomentMapCurve, tol_zero: float = 1e-9) -> tuple[Kind, str]:
    c = curve.curvatures
    if any(abs(x) <= tol_zero for x in c):
        return Kind.INDETERMINATE, f"flat region: |curvature| <= {tol_zero:g} at some sample"
    if all(x > 0 for x in c):
        return Kind.CONCAVE, "curvature > 0 at every sample"
    if all(x < 0 for x in c):
        return Kind.CONVEX, "curvature < 0 at every sample"
    return Kind.INDETERMINATE, "curvature changes sign along the curve"


# ---------------------------------------------------------------------------
# Verdict


@dataclass(frozen=True)
class VerdictOptions:
    curve: str = "fallback"  # "never" | "fallback" | "always"
    n_samples: int = 65
    margin: float = 1e-3
    tol_zero: float = 1e-9
    rtol: float = 1e-10
    threads: int = 1


@dataclass(frozen=True)
class Verdict:
    kind: Kind
    method: Method
    criterion: Criterion3Report
    curve: MomentMapCurve | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def curvature_signs(self) -> list[str]:
        if self.curve is None:
            return []
        return ["+" if c > 0 else "-" if c < 0 else "0" for c in self.curve.curvatures]


def verdict(system: SeparatedSystem, options: VerdictOptions | None = None) -> Verdict:
    """Criterion 3 first; the sampled curve decides (or confirms) as requested."""
    opts = options or VerdictOptions()
    c3 = criterion3(system)
    want_curve = opts.curve == "always" or (opts.curve == "fallback" and c3.kind is Kind.INDETERMINATE)
    if not want_curve:
        return Verdict(kind=c3.kind, method=Method.CRITERION3, criterion=c3)
    curve = moment_curve(
        system, n_samples=opts.n_samples, margin=opts.margin, rtol=opts.rtol, threads=opts.threads
    )
    ck, note = curve_kind(curve, opts.tol_zero)
    if c3.kind is Kind.INDETERMINATE:
        return Verdict(kind=ck, method=Method.CURVE_CURVATURE, criterion=c3, curve=curve, notes=(note,))
    if ck is c3.kind:
        return Verdict(kind=ck, method=Method.BOTH, criterion=c3, curve=curve, notes=(note,))
    return Verdict(
        kind=Kind.INDETERMINATE,
        method=Method.BOTH,
        criterion=c3,
        curve=curve,
        notes=(note, f"Criterion 3 says {c3.kind.value} but the sampled curve disagrees"),
    )
