import math

import numpy as np
import pytest

from starktoric.actionengine import (
    HalfSystem,
    _quarter_integrals,
    action,
    action_profile,
    radial_derivatives,
    radial_solve,
    star_shape_check,
)
from starktoric.errors import RootNotBracketed
from starktoric.oracles import fd_derivative_audit
from starktoric.polycore import UnivariatePoly


def harmonic(f):
    return HalfSystem(0.5, UnivariatePoly([0, f]))


FROZEN = HalfSystem(0.5, UnivariatePoly([0, 2, 0, -1]))


def bisect(fn, lo, hi, iters=200):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if fn(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.parametrize("theta", np.linspace(0, 2 * np.pi, 13))
def test_radial_solve_harmonic(theta):
    assert radial_solve(harmonic(0.5), 3.0, theta) == pytest.approx(6.0, rel=1e-14)


@pytest.mark.parametrize("a", [0.1, 0.7, 1.05])
def test_radial_solve_on_momentum_axis(a):
    assert radial_solve(FROZEN, a, 0.0) == pytest.approx(a / 0.5, rel=1e-14)


def test_radial_solve_frozen_hill_smallest_root():
    expected = bisect(lambda x: 2 * x - x**3 - 1, 0.0, math.sqrt(2 / 3))
    A = radial_solve(FROZEN, 1.0, math.pi / 2)
    assert A == pytest.approx(expected, abs=1e-13)
    assert A == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-13)


def test_radial_solve_vectorized_and_residual():
    theta = np.linspace(0, 2 * np.pi, 101)
    A = radial_solve(FROZEN, 0.9, theta)
    resid = 0.5 * A * np.cos(theta) ** 2 + FROZEN.v(A * np.sin(theta) ** 2) - 0.9
    assert np.max(np.abs(resid)) < 1e-13


def test_radial_solve_above_barrier():
    with pytest.raises(RootNotBracketed):
        radial_solve(FROZEN, 1.2, 1.0)


def test_radial_derivatives_harmonic_and_axis():
    f = 0.5
    for theta in (0.0, 0.4, 1.3):
        r = radial_derivatives(harmonic(f), 2.0, theta)
        assert r.A1 == pytest.approx(1 / (0.5 * math.cos(theta) ** 2 + f * math.sin(theta) ** 2))
        assert r.A2 == 0.0
    r = radial_derivatives(FROZEN, 0.8, 0.0)
    assert r.A1 == pytest.approx(2.0) and r.A2 == 0.0


def test_radial_derivatives_frozen_pole():
    r = radial_derivatives(FROZEN, 1.0, math.pi / 2)
    A1 = 1 / (2 - 3 * r.A**2)
    assert r.A1 == pytest.approx(A1, rel=1e-13)
    assert r.A2 == pytest.approx(6 * r.A * A1**3, rel=1e-13)
    # second-order central differences of the radius
    h = 1e-4
    lo, mid, hi = (radial_solve(FROZEN, 1.0 + d, math.pi / 2) for d in (-h, 0, h))
    assert (hi - 2 * mid + lo) / h**2 == pytest.approx(r.A2, rel=1e-5)


def test_fd_consistency_frozen_hill():
    grid = np.linspace(0.1, 0.9, 5) * FROZEN.a_max
    audit = fd_derivative_audit(FROZEN, grid, step=1e-5, with_actions=False,
                                thetas=np.linspace(0.05, np.pi / 2, 17))
    assert audit.nan_sites == 0
    assert audit.max_rel_A1 <= 1e-6
    assert audit.max_rel_A2 <= 1e-6


@pytest.mark.parametrize("f", [0.5, 2.0])
def test_harmonic_exactness(f):
    for a in np.logspace(-3, 2, 11):
        v = action(harmonic(f), a)
        exact = a / math.sqrt(2 * f)
        assert abs(v.I - exact) / exact <= 1e-10
        assert v.I1 == pytest.approx(1 / math.sqrt(2 * f), rel=1e-10)
        assert abs(v.I2) <= 1e-12


def test_action_at_zero():
    v = action(FROZEN, 0.0)
    assert v.I == 0.0
    assert v.I1 > 0 and math.isfinite(v.I1)
    assert math.isfinite(v.I2)


@pytest.mark.parametrize("p", [2, 3])
def test_pure_power_scaling(p):
    h = HalfSystem(0.5, UnivariatePoly.from_terms({p: 1}))
    base = action(h, 1.0).I
    for a in (0.25, 4.0, 9.0):
        assert action(h, a).I == pytest.approx(base * a ** ((p + 1) / (2 * p)), rel=1e-8)


def test_monotone_action_profile():
    grid = np.linspace(0, 0.999 * FROZEN.a_max, 40)
    prof = action_profile(FROZEN, grid)
    I = [s[1] for s in prof.samples]
    assert I[0] == 0.0
    assert all(x < y for x, y in zip(I, I[1:]))
    assert all(s[2] > 0 for s in prof.samples)


def test_quadrature_convergence():
    a = 0.95 * FROZEN.a_max
    vals = [_quarter_integrals(FROZEN, a, 2**k)[0] for k in range(0, 8)]
    diffs = [abs(x - y) / abs(y) for x, y in zip(vals, vals[1:])]
    # geometric decrease until roundoff, then stays at roundoff
    reached = next(i for i, d in enumerate(diffs) if d < 1e-13)
    assert all(x > y for x, y in zip(diffs[:reached], diffs[1 : reached + 1]))
    assert diffs[-1] < 1e-12
    v = action(FROZEN, a)
    assert abs(_quarter_integrals(FROZEN, a, 2 * v.nodes // 16)[0] - v.I) / v.I < 1e-12


def test_star_shape():
    for a in (0.1, 1.0, 10.0):
        assert star_shape_check(harmonic(0.5), a)
    for a in np.linspace(0.05, 0.999, 6) * FROZEN.a_max:
        assert star_shape_check(FROZEN, a)
    assert not star_shape_check(FROZEN, 1.1 * FROZEN.a_max)


def test_sign_link():
    # V' > 0, V'' < 0 -> I'' > 0 ; V' > 0, V'' > 0 -> I'' < 0
    for a in np.linspace(0.05, 0.95, 7) * FROZEN.a_max:
        assert action(FROZEN, a).I2 > 0
    soft = HalfSystem(0.5, UnivariatePoly([0, 1, 0, 1]))
    for a in (0.1, 1.0, 5.0):
        assert action(soft, a).I2 < 0
