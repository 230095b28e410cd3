"""Brute-force validators used as test oracles.

None of these share a code path with the engines they check:

* :func:`mc_area` counts hits of ``kappa w^2 + V(z^2) <= a`` in a box;
* :func:`fd_derivative_audit` re-solves the level-set equation in 40-digit
  arithmetic (mpmath) and differentiates by central differences;
* :func:`identity_audit` recovers the C_k by exact Gaussian elimination on
  the monomial-matching system, never touching the recurrence;
* :func:`find_critical_points` locates critical points of V(q) with a
  multistart Newton-type solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy.optimize import root

from .actionengine import HalfSystem, action, radial_derivatives
from .errors import InvalidParameter, UnboundedRegion
from .lcseparation import PolynomialPotential
from .polycore import (
    N_MAX,
    BivariatePoly,
    ck_table,
    cn_from_d,
    dk_positivity,
    lc_pullback,
)

MC_BATCH = 1 << 20


# ---------------------------------------------------------------------------
# Monte Carlo area


@dataclass(frozen=True)
class AreaEstimate:
    value: float
    stderr: float
    n_samples: int
    rng_seed: int


def _batch_generator(seed: int, index: int) -> np.random.Generator:
    # Philox is counter based: batch i gets its own disjoint stream
    return np.random.Generator(np.random.Philox(key=seed).jumped(index))


def mc_area(h: HalfSystem, a: float, n_samples: int, seed: int) -> AreaEstimate:
    """Hit-or-miss estimate of the area of the compact sublevel set ``K <= a``.

    The box is ``|z| <= sqrt(u_a)``, ``|w| <= sqrt(a/kappa)`` where
    ``V(u_a) = a`` on the well side of the barrier, so it contains exactly
    the bounded component.
    """
    if n_samples < 2:
        raise InvalidParameter("need at least two samples")
    if a == 0:
        return AreaEstimate(0.0, 0.0, n_samples, seed)
    if not 0 < a < h.a_max:
        raise UnboundedRegion(f"no bounded sublevel set for a = {a} (barrier {h.a_max})")
    z_max = math.sqrt(h.level_u(a))
    w_max = math.sqrt(a / h.kappa)
    box = 4.0 * z_max * w_max
    coeffs = np.array([float(c) for c in h.v.coeffs][::-1])
    hits = 0
    done = 0
    index = 0
    while done < n_samples:
        size = min(MC_BATCH, n_samples - done)
        rng = _batch_generator(seed, index)
        z = rng.uniform(-z_max, z_max, size)
        w = rng.uniform(-w_max, w_max, size)
        k = h.kappa * w * w + np.polyval(coeffs, z * z)
        hits += int(np.count_nonzero(k <= a))
        done += size
        index += 1
    p = hits / n_samples
    std = math.sqrt(p * (1 - p) * n_samples / (n_samples - 1))
    return AreaEstimate(value=box * p, stderr=box * std / math.sqrt(n_samples), n_samples=n_samples, rng_seed=seed)


# ---------------------------------------------------------------------------
# High-precision finite differences


class _MpHalf:
    """The same half-system evaluated in mpmath at ``dps`` digits."""

    def __init__(self, h: HalfSystem, dps: int):
        self.dps = dps
        with mpmath.workdps(dps):
            self.kappa = mpmath.mpf(h.kappa)
            self.coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in h.v.coeffs]
            self.u_star = mpmath.mpf(h.u_star) if math.isfinite(h.u_star) else mpmath.inf

    def v(self, u):
        acc = mpmath.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc

    def radius(self, a, theta):
        """Smallest positive root by doubling to a sign change, then bisection-secant."""
        with mpmath.workdps(self.dps):
            a = mpmath.mpf(a)
            c2 = mpmath.cos(theta) ** 2
            s2 = mpmath.sin(theta) ** 2

            def g(x):
                return self.kappa * x * c2 + self.v(x * s2) - a

            if a == 0:
                return mpmath.mpf(0)
            slope0 = self.kappa + (abs(self.coeffs[1]) if len(self.coeffs) > 1 else 0)
            cap = self.u_star / s2 if s2 > 0 else mpmath.inf
            lo, hi = mpmath.mpf(0), a / slope0
            while g(hi) < 0:
                lo, hi = hi, min(hi * mpmath.mpf(1.25), cap)
                if hi == lo:
                    raise UnboundedRegion(f"no radial root below the barrier at a = {a}")
            return mpmath.findroot(g, (lo, hi), solver="anderson", tol=mpmath.mpf(10) ** (-self.dps + 5))

    def action(self, a):
        with mpmath.workdps(self.dps):
            quarter = mpmath.quad(lambda t: self.radius(a, t), [0, mpmath.pi / 4, mpmath.pi / 2])
            return quarter / mpmath.pi


@dataclass(frozen=True)
class FDAudit:
    step: float
    max_rel_A1: float
    max_rel_A2: float
    max_rel_I1: float
    max_rel_I2: float
    nan_sites: int

    @property
    def worst(self) -> float:
        return max(self.max_rel_A1, self.max_rel_A2, self.max_rel_I1, self.max_rel_I2)


def _rel(x: float, y, atol: float) -> float:
    y = float(y)
    if not (math.isfinite(x) and math.isfinite(y)):
        return math.nan
    return abs(x - y) / max(abs(y), atol)


def fd_derivative_audit(
    h: HalfSystem,
    a_grid,
    step: float = 1e-5,
    thetas=None,
    dps: int = 40,
    with_actions: bool = True,
    atol: float = 1e-14,
) -> FDAudit:
    """Compare closed-form A', A'', I', I'' with central differences.

    Values of A and I at ``a`` and ``a +- step`` come from a 40-digit
    re-solve of the level-set equation, so the differences are limited by
    truncation (O(step^2)) only.  ``atol`` floors the denominators where a
    derivative vanishes identically (e.g. A'' on the axis).
    """
    thetas = np.linspace(0.05, 0.5 * np.pi, 9) if thetas is None else thetas
    mp = _MpHalf(h, dps)
    errs = {"A1": 0.0, "A2": 0.0, "I1": 0.0, "I2": 0.0}
    nan_sites = 0

    def update(key, value):
        nonlocal nan_sites
        if math.isnan(value):
            nan_sites += 1
        else:
            errs[key] = max(errs[key], value)

    with mpmath.workdps(dps):
        hs = mpmath.mpf(step)
        for a in a_grid:
            am = mpmath.mpf(a)
            for theta in thetas:
                t = mpmath.mpf(theta)
                lo, mid, hi = (mp.radius(am + d, t) for d in (-hs, 0, hs))
                closed = radial_derivatives(h, float(a), float(theta))
                update("A1", _rel(closed.A1, (hi - lo) / (2 * hs), atol))
                update("A2", _rel(closed.A2, (hi - 2 * mid + lo) / hs**2, atol))
            if with_actions:
                lo, mid, hi = (mp.action(am + d) for d in (-hs, 0, hs))
                closed = action(h, float(a))
                update("I1", _rel(closed.I1, (hi - lo) / (2 * hs), atol))
                update("I2", _rel(closed.I2, (hi - 2 * mid + lo) / hs**2, atol))
    return FDAudit(step, errs["A1"], errs["A2"], errs["I1"], errs["I2"], nan_sites)


# ---------------------------------------------------------------------------
# Exact identity audit


def solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of an (over)determined exact system, or None."""
    rows = [list(r) + [b] for r, b in zip(matrix, rhs)]
    ncols = len(matrix[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if len(pivots) < ncols:
        return None
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    return [rows[i][-1] for i in range(ncols)]


def brute_force_coefficients(n: int) -> list[Fraction] | None:
    """Coefficients of every degree-2n form F with pullback z1^(4n+2) + z2^(4n+2).

    Unknowns are the coefficients of q1^(2n-j) q2^j, j = 0..2n.  Returns
    C_k-normalized values (coefficient of q1^(2n-2k) q2^(2k) times 4^k) when
    the solution is unique and has no odd-j part, else None.
    """
    basis = [lc_pullback(BivariatePoly.monomial(2 * n - j, j)) for j in range(2 * n + 1)]
    degree = 4 * n + 2
    rows = [[p.coefficient(i, degree - i) for p in basis] for i in range(degree + 1)]
    rhs = [Fraction(int(i in (0, degree))) for i in range(degree + 1)]
    sol = solve_exact(rows, rhs)
    if sol is None or any(sol[j] != 0 for j in range(1, 2 * n + 1, 2)):
        return None
    return [sol[2 * k] * 4**k for k in range(n + 1)]


@dataclass(frozen=True)
class IdentityRow:
    n: int
    c: tuple[int, ...]
    brute: tuple[Fraction, ...] | None
    matches: bool
    cn_is_one: bool
    cn_from_d_ok: bool
    d_ok: bool
    big_d: tuple[int, ...]
    d_positive: bool


@dataclass(frozen=True)
class IdentityAudit:
    rows: tuple[IdentityRow, ...]

    @property
    def mismatches(self) -> list[int]:
        return [
            r.n for r in self.rows if not (r.matches and r.cn_is_one and r.d_ok and r.cn_from_d_ok)
        ]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def identity_audit(n_max: int) -> IdentityAudit:
    if not 1 <= n_max <= N_MAX:
        raise InvalidParameter(f"n_max must be in 1..{N_MAX}, got {n_max}")
    rows = []
    for n in range(1, n_max + 1):
        table = ck_table(n)
        brute = brute_force_coefficients(n)
        rows.append(
            IdentityRow(
                n=n,
                c=table.c,
                brute=None if brute is None else tuple(brute),
                matches=brute is not None and tuple(brute) == tuple(Fraction(x) for x in table.c),
                cn_is_one=table.c[0] == 1 and table.c[-1] == 1,
                cn_from_d_ok=cn_from_d(table.d_small) == table.c[-1],
                d_ok=all(d == (-1) ** (k + 1) * 2 for k, d in enumerate(table.d_small, 1)),
                big_d=table.big_d,
                d_positive=dk_positivity(table)[0],
            )
        )
    return IdentityAudit(rows=tuple(rows))


# ---------------------------------------------------------------------------
# Numeric critical points of the configuration potential


@dataclass(frozen=True)
class CriticalPoint:
    q: tuple[float, float]
    value: float


def find_critical_points(
    potential: PolynomialPotential,
    radii=(0.3, 0.6, 1.0, 1.5, 2.5),
    n_angles: int = 24,
    tol: float = 1e-12,
) -> list[CriticalPoint]:
    """Multistart search for zeros of grad V away from the origin."""
    m = float(potential.m)
    gx, gy = potential.G.diff(0), potential.G.diff(1)
    gxx, gxy, gyy = gx.diff(0), gx.diff(1), gy.diff(1)
    as_float = lambda p: [(e, float(c)) for e, c in p.items()]  # noqa: E731
    polys = [as_float(p) for p in (gx, gy, gxx, gxy, gyy)]

    def ev(p, x, y):
        return sum(c * x**e1 * y**e2 for (e1, e2), c in p)

    def grad_hess(q):
        x, y = q
        r2 = x * x + y * y
        r = math.sqrt(r2)
        r3, r5 = r2 * r, r2 * r2 * r
        grad = np.array([m * x / r3 - ev(polys[0], x, y), m * y / r3 - ev(polys[1], x, y)])
        hess = np.array(
            [
                [m * (1 / r3 - 3 * x * x / r5) - ev(polys[2], x, y), -3 * m * x * y / r5 - ev(polys[3], x, y)],
                [-3 * m * x * y / r5 - ev(polys[3], x, y), m * (1 / r3 - 3 * y * y / r5) - ev(polys[4], x, y)],
            ]
        )
        return grad, hess

    scale = 1.0
    if potential.g is not None and potential.n is not None:
        scale = (m / abs(float(potential.g))) ** (1.0 / (2 * potential.n + 1))
    found: list[np.ndarray] = []
    for r in radii:
        for k in range(n_angles):
            phi = 2 * math.pi * (k + 0.5) / n_angles
            start = scale * r * np.array([math.cos(phi), math.sin(phi)])
            sol = root(grad_hess, start, jac=True, method="hybr", tol=1e-14)
            q = sol.x
            if not np.all(np.isfinite(q)) or np.hypot(*q) < 1e-8 * scale:
                continue
            for _ in range(3):
                g, hm = grad_hess(q)
                try:
                    q = q - np.linalg.solve(hm, g)
                except np.linalg.LinAlgError:
                    break
            g, _ = grad_hess(q)
            if np.linalg.norm(g) > tol * max(1.0, m / float(np.dot(q, q))):
                continue
            if all(np.linalg.norm(q - p) > 1e-6 * scale for p in found):
                found.append(q)
    found.sort(key=lambda p: (round(float(p[0]), 9), round(float(p[1]), 9)))
    return [CriticalPoint(q=(float(p[0]), float(p[1])), value=float(potential(p[0], p[1]))) for p in found]
