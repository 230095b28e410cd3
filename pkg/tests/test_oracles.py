import math
from fractions import Fraction

import numpy as np
import pytest

from starktoric.actionengine import HalfSystem, action
from starktoric.errors import UnboundedRegion
from starktoric.oracles import (
    brute_force_coefficients,
    fd_derivative_audit,
    identity_audit,
    mc_area,
    solve_exact,
)
from starktoric.polycore import UnivariatePoly

HARMONIC = HalfSystem(0.5, UnivariatePoly([0, Fraction(1, 2)]))
FROZEN = HalfSystem(0.5, UnivariatePoly([0, 2, 0, -1]))


def test_mc_area_deterministic():
    a = mc_area(FROZEN, 0.5, 50_000, seed=3)
    b = mc_area(FROZEN, 0.5, 50_000, seed=3)
    assert a == b
    assert mc_area(FROZEN, 0.5, 50_000, seed=4).value != a.value
    assert a.n_samples == 50_000 and a.rng_seed == 3


def test_mc_area_zero_and_unbounded():
    assert mc_area(HARMONIC, 0.0, 1000, seed=1).value == 0.0
    with pytest.raises(UnboundedRegion):
        mc_area(FROZEN, 2.0, 1000, seed=1)


@pytest.mark.parametrize("h, a", [(HARMONIC, 1.0), (FROZEN, 0.5), (FROZEN, 1.0)])
def test_mc_area_matches_action(h, a):
    est = mc_area(h, a, 400_000, seed=11)
    assert abs(est.value - 2 * math.pi * action(h, a).I) <= 4 * est.stderr


def test_solve_exact():
    x = solve_exact([[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]], [Fraction(3), Fraction(4)])
    assert x == [1, 1]
    assert solve_exact([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]], [Fraction(1), Fraction(2)]) is None


@pytest.mark.parametrize("n, expected", [(1, [1, 1]), (2, [1, 3, 1]), (3, [1, 5, 6, 1])])
def test_brute_force_coefficients(n, expected):
    assert brute_force_coefficients(n) == expected


def test_identity_audit():
    report = identity_audit(8)
    assert report.ok
    assert report.mismatches == []
    assert [r.n for r in report.rows] == list(range(1, 9))


def test_fd_audit_harmonic():
    audit = fd_derivative_audit(HARMONIC, [0.2, 1.0, 3.0], step=1e-5)
    assert audit.nan_sites == 0
    assert audit.worst <= 1e-10


def test_fd_audit_frozen_hill():
    grid = list(np.linspace(0.1, 0.9, 3) * FROZEN.a_max)
    audit = fd_derivative_audit(FROZEN, grid, step=1e-5)
    assert audit.nan_sites == 0
    assert max(audit.max_rel_A1, audit.max_rel_A2, audit.max_rel_I1, audit.max_rel_I2) <= 1e-6


def test_fd_step_sweep_second_order():
    grid = [0.5 * FROZEN.a_max]
    errs = [fd_derivative_audit(FROZEN, grid, step=s, with_actions=False).max_rel_A2 for s in (1e-4, 1e-5, 1e-6)]
    orders = [math.log10(e0 / e1) for e0, e1 in zip(errs, errs[1:])]
    # the 40-digit reference keeps roundoff out of the way: two digits per decade
    assert orders == pytest.approx([2.0, 2.0], abs=0.3)
