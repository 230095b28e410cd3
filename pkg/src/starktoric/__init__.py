"""Concave/convex toric-domain analysis of Levi-Civita regularized Stark-type systems."""

from .actionengine import HalfSystem, action, radial_derivatives, radial_solve, star_shape_check
from .lcseparation import (
    EnergyRegime,
    PolynomialPotential,
    SeparatedSystem,
    barrier,
    build_system,
    classify_energy,
    critical_values,
    separate,
)
from .polycore import (
    BivariatePoly,
    CoefficientTable,
    UnivariatePoly,
    ck_table,
    dk_positivity,
    lc_pullback,
    poly_identity_check,
    split_separable,
)
from .toricverdict import Kind, Method, VerdictOptions, criterion3, moment_curve, verdict

__version__ = "0.1.0"

__all__ = [
    "BivariatePoly",
    "CoefficientTable",
    "EnergyRegime",
    "HalfSystem",
    "Kind",
    "Method",
    "PolynomialPotential",
    "SeparatedSystem",
    "UnivariatePoly",
    "VerdictOptions",
    "action",
    "barrier",
    "build_system",
    "ck_table",
    "classify_energy",
    "criterion3",
    "critical_values",
    "dk_positivity",
    "lc_pullback",
    "moment_curve",
    "poly_identity_check",
    "radial_derivatives",
    "radial_solve",
    "separate",
    "split_separable",
    "star_shape_check",
    "verdict",
]
