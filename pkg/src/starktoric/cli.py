"""Command-line interface.

Subcommands::

    starktoric coeffs --n 5 [--json]
    starktoric analyze SPEC.json [--samples 65] [--out FILE] [--format csv|json]
    starktoric curve SPEC.json --out FILE          # analyze with a mandatory curve file
    starktoric audit [--n-max 8] [--mc-samples N] [--seed 42]

Exit codes: 0 success (any verdict), 1 audit failure, 2 invalid input or
not separable, 3 no bounded component, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .actionengine import HalfSystem, action
from .errors import (
    InvalidParameter,
    MultipleCriticalPoints,
    NoBoundedComponent,
    NotSeparable,
    NumericalError,
    StarkToricError,
    UnboundedRegion,
)
from .lcseparation import (
    KINDS,
    EnergyRegime,
    build_system,
    classify_energy,
    critical_values,
    separate,
)
from .oracles import fd_derivative_audit, identity_audit, mc_area
from .polycore import N_MAX, BivariatePoly, UnivariatePoly, as_fraction, ck_table, dk_positivity
from .toricverdict import MomentMapCurve, VerdictOptions, verdict

EXIT_OK, EXIT_AUDIT, EXIT_INPUT, EXIT_UNBOUNDED, EXIT_NUMERIC = 0, 1, 2, 3, 4
CSV_COLUMNS = ("a", "b", "I1", "I2", "dI2_dI1", "d2I2_dI12")


class SpecError(StarkToricError):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# spec files


def load_spec(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecError("spec must be a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise SpecError(f"spec 'kind' must be one of {', '.join(KINDS)}, got {kind!r}")
    for key in ("m", "f"):
        if key not in doc:
            raise SpecError(f"spec is missing '{key}'")
    return doc


def _rational(doc: dict, key: str):
    value = doc.get(key)
    if value is None:
        return None
    try:
        return as_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"'{key}' is not a rational number: {value!r}") from exc


def system_from_spec(doc: dict):
    G = None
    if doc["kind"] == "custom":
        terms = doc.get("custom_G")
        if not isinstance(terms, list):
            raise SpecError("custom kind needs 'custom_G': [[coefficient, e1, e2], ...]")
        try:
            G = BivariatePoly({(int(e1), int(e2)): as_fraction(c) for c, e1, e2 in terms})
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise SpecError(f"bad custom_G entry: {exc}") from exc
    n = doc.get("n")
    if doc["kind"] == "frozen-hill":
        n = None
    potential = build_system(doc["kind"], m=_rational(doc, "m"), g=_rational(doc, "g"), n=n, G=G)
    return potential, separate(potential, _rational(doc, "f"))


# ---------------------------------------------------------------------------
# subcommands


def cmd_coeffs(args) -> int:
    table = ck_table(args.n)
    ok, bad = dk_positivity(table)
    if args.json:
        doc = {
            "n": table.n,
            "C": list(table.c),
            "d": list(table.d_small),
            "D": list(table.big_d),
            "D_index_range": [0, table.n - 1],
            "D_stated_range": [1, table.n],
            "all_positive": ok,
            "first_violation": bad,
            "cn_is_one": table.c[-1] == 1,
        }
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    print(
        "C: " + " ".join(map(str, table.c))
        + " | D: " + " ".join(map(str, table.big_d))
        + f" | all-positive: {str(ok).lower()}"
    )
    print("d: " + " ".join(map(str, table.d_small)))
    print(f"C_n = 1: {str(table.c[-1] == 1).lower()}")
    if not ok:
        print(f"first non-positive D_k at k = {bad}")
    print("D_k checked for k = 0..n-1 (stated range k = 1..n; k = n would need C_(n+1))")
    return EXIT_OK


def write_curve(curve: MomentMapCurve, path: Path, fmt: str) -> None:
    rows = [(s.a, s.b, s.I1, s.I2, s.slope, s.curvature) for s in curve.samples]
    if fmt == "csv":
        lines = [",".join(CSV_COLUMNS)] + [",".join(_fmt(x) for x in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
    else:
        doc = {
            "m_level": str(curve.m_level),
            "margin": curve.margin,
            "columns": list(CSV_COLUMNS),
            "rows": [[float(x) for x in row] for row in rows],
        }
        path.write_text(json.dumps(doc, indent=1) + "\n")


def cmd_analyze(args) -> int:
    doc = load_spec(args.spec)
    potential, system = system_from_spec(doc)
    print(
        f"system: {potential.label}  m={potential.m}"
        + (f"  g={potential.g}" if potential.g is not None else "")
        + (f"  n={potential.n}" if potential.n is not None else "")
        + f"  f={system.f}"
    )
    regime = classify_energy(system, potential)
    line = f"energy regime: {regime.value}"
    if potential.g is not None and potential.g > 0 and potential.n is not None:
        e1 = critical_values(potential.n, potential.m, potential.g).e1
        line += f" (-f = {_fmt(-system.f)}, E1 = {_fmt(e1)})"
    print(line)
    if regime is EnergyRegime.ABOVE_FIRST_CRITICAL:
        raise NoBoundedComponent("energy above first critical value: no bounded component")
    opts = VerdictOptions(
        curve="always" if args.out else "fallback",
        n_samples=args.samples,
        margin=args.margin,
        tol_zero=args.tolerance,
        threads=args.threads,
    )
    result = verdict(system, opts)
    print("criterion 3 signs on the swept range:")
    for row in result.criterion.table():
        print("  " + row)
    print(f"criterion 3: {result.criterion.kind.value}")
    if result.curve is not None:
        c = result.curve.curvatures
        print(
            f"curve: {len(c)} samples, d2I2/dI1^2 in [{_fmt(min(c))}, {_fmt(max(c))}], "
            f"dI2/dI1 max {_fmt(max(result.curve.slopes))}"
        )
    for note in result.notes:
        print(f"note: {note}")
    print(f"verdict: {result.kind.value} ({result.method.value})")
    if args.out:
        write_curve(result.curve, Path(args.out), args.format)
    return EXIT_OK


def cmd_audit(args) -> int:
    if not 1 <= args.n_max <= N_MAX:
        print(f"error: --n-max must be in 1..{N_MAX}", file=sys.stderr)
        return EXIT_INPUT
    failed = False
    ident = identity_audit(args.n_max)
    print(f"identity audit n = 1..{args.n_max}: {'pass' if ident.ok else 'FAIL ' + str(ident.mismatches)}")
    failed |= not ident.ok

    refs = {
        "harmonic f=1/2": (HalfSystem(0.5, UnivariatePoly([0, "1/2"])), 1.0, 1e-10),
        "frozen-hill f=2 g=1": (HalfSystem(0.5, UnivariatePoly([0, 2, 0, -1])), 0.5, 1e-6),
    }
    for name, (h, a_mc, fd_tol) in refs.items():
        top = h.a_max if math.isfinite(h.a_max) else 1.0
        grid = list(np.linspace(0.1, 0.9, args.fd_points) * top)
        fd = fd_derivative_audit(h, grid, step=args.fd_step)
        ok = fd.worst <= fd_tol and fd.nan_sites == 0
        failed |= not ok
        print(
            f"fd audit [{name}]: A' {fd.max_rel_A1:.2e}  A'' {fd.max_rel_A2:.2e}  "
            f"I' {fd.max_rel_I1:.2e}  I'' {fd.max_rel_I2:.2e}  -> {'pass' if ok else 'FAIL'}"
        )
        est = mc_area(h, a_mc, args.mc_samples, args.seed)
        exact = 2 * math.pi * action(h, a_mc).I
        z = (est.value - exact) / est.stderr
        ok = abs(z) <= 3
        failed |= not ok
        print(
            f"area check [{name}] a={a_mc}: 2*pi*I = {_fmt(exact)}  MC = {_fmt(est.value)} "
            f"+- {est.stderr:.3e} ({z:+.2f} sigma) -> {'pass' if ok else 'FAIL'}"
        )
    return EXIT_AUDIT if failed else EXIT_OK


# ---------------------------------------------------------------------------


def _analyze_flags(p: argparse.ArgumentParser, out_required: bool) -> None:
    p.add_argument("spec", help="JSON system specification")
    p.add_argument("--samples", type=int, default=65)
    p.add_argument("--out", required=out_required, help="write the sampled curve here")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--margin", type=float, default=1e-3)
    p.add_argument("--tolerance", type=float, default=1e-9, help="curvature zero band")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_analyze)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="starktoric", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="C_k table, d_k and D_k for the generalized family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_coeffs)

    _analyze_flags(sub.add_parser("analyze", help="energy regime, Criterion 3 and verdict"), False)
    _analyze_flags(sub.add_parser("curve", help="analyze and write the moment-map curve"), True)

    p = sub.add_parser("audit", help="run the independent oracles")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--mc-samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--fd-step", type=float, default=1e-5)
    p.add_argument("--fd-points", type=int, default=5)
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NotSeparable, InvalidParameter, MultipleCriticalPoints, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NoBoundedComponent, UnboundedRegion) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNBOUNDED
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
