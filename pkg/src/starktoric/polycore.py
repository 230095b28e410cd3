"""Exact polynomial algebra over the rationals.

Everything here uses :class:`fractions.Fraction` and Python integers, so no
rounding ever happens.  Two polynomial types are provided:

* :class:`BivariatePoly` -- sparse, keyed by exponent pairs ``(e1, e2)``.
* :class:`UnivariatePoly` -- dense, coefficients stored lowest degree first.

On top of these sit the coefficient recurrence of the generalized
Stark-type family (:func:`ck_table`), the Levi-Civita pullback
(:func:`lc_pullback`) and the separability splitter (:func:`split_separable`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from numbers import Rational
from typing import Iterable, Mapping

from .errors import InvalidParameter, NotSeparable

N_MAX = 64

Exponent = tuple[int, int]


def as_fraction(x) -> Fraction:
    """Exact conversion; strings like ``"3/4"`` and floats (bit-exact) allowed."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class BivariatePoly:
    """Sparse polynomial in two variables with rational coefficients.

    Instances are immutable.  Zero coefficients are never stored.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Exponent, object] | Iterable[tuple[Exponent, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, Fraction] = {}
        for (e1, e2), c in items:
            if e1 < 0 or e2 < 0:
                raise ValueError(f"negative exponent ({e1}, {e2})")
            key = (int(e1), int(e2))
            acc[key] = acc.get(key, Fraction(0)) + as_fraction(c)
        self._terms = {k: v for k, v in sorted(acc.items()) if v != 0}

    @classmethod
    def constant(cls, c) -> BivariatePoly:
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, e1: int, e2: int, c=1) -> BivariatePoly:
        return cls({(e1, e2): c})

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self):
        """Terms in deterministic (lexicographic exponent) order."""
        return sorted(self._terms.items())

    def coefficient(self, e1: int, e2: int) -> Fraction:
        return self._terms.get((e1, e2), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def total_degree(self) -> int:
        return max((e1 + e2 for e1, e2 in self._terms), default=-1)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BivariatePoly.constant(other)
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self.items()))

    def __bool__(self):
        return bool(self._terms)

    def _coerce(self, other) -> BivariatePoly:
        if isinstance(other, BivariatePoly):
            return other
        return BivariatePoly.constant(as_fraction(other))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return BivariatePoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[Exponent, Fraction] = {}
        for (a1, a2), u in self._terms.items():
            for (b1, b2), v in other._terms.items():
                k = (a1 + b1, a2 + b2)
                out[k] = out.get(k, Fraction(0)) + u * v
        return BivariatePoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = BivariatePoly.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, x, y):
        """Evaluate; exact for rational inputs, float for float inputs."""
        return sum((c * x**e1 * y**e2 for (e1, e2), c in self.items()), Fraction(0))

    def diff(self, var: int) -> BivariatePoly:
        """Partial derivative with respect to variable 0 (x) or 1 (y)."""
        out = {}
        for (e1, e2), c in self._terms.items():
            e = (e1, e2)[var]
            if e:
                out[(e1 - 1, e2) if var == 0 else (e1, e2 - 1)] = c * e
        return BivariatePoly(out)

    def substitute(self, p1: BivariatePoly, p2: BivariatePoly) -> BivariatePoly:
        """Return ``self(p1, p2)`` as a new bivariate polynomial."""
        pow1: dict[int, BivariatePoly] = {0: BivariatePoly.constant(1)}
        pow2: dict[int, BivariatePoly] = {0: BivariatePoly.constant(1)}

        def power(cache, base, e):
            if e not in cache:
                cache[e] = power(cache, base, e - 1) * base
            return cache[e]

        acc: dict[Exponent, Fraction] = {}
        for (e1, e2), c in self.items():
            term = power(pow1, p1, e1) * power(pow2, p2, e2)
            for k, v in term._terms.items():
                acc[k] = acc.get(k, Fraction(0)) + c * v
        return BivariatePoly(acc)

    def __repr__(self):
        if not self._terms:
            return "BivariatePoly(0)"
        parts = []
        for (e1, e2), c in self.items():
            mono = "*".join(
                s for s in (f"x^{e1}" if e1 else "", f"y^{e2}" if e2 else "") if s
            )
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "BivariatePoly(" + " + ".join(parts) + ")"


def _trim(coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class UnivariatePoly:
    """Dense univariate polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs", "_float")

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs: tuple[Fraction, ...] = _trim([as_fraction(c) for c in coeffs])
        self._float = None

    @classmethod
    def from_terms(cls, terms: Mapping[int, object]) -> UnivariatePoly:
        if not terms:
            return cls()
        out = [Fraction(0)] * (max(terms) + 1)
        for e, c in terms.items():
            out[e] += as_fraction(c)
        return cls(out)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UnivariatePoly([other])
        if not isinstance(other, UnivariatePoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def _coerce(self, other) -> UnivariatePoly:
        return other if isinstance(other, UnivariatePoly) else UnivariatePoly([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        for i, c in enumerate(other.coeffs):
            a[i] += c
        return UnivariatePoly(a)

    __radd__ = __add__

    def __neg__(self):
        return UnivariatePoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return UnivariatePoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, u in enumerate(self.coeffs):
            for j, v in enumerate(other.coeffs):
                out[i + j] += u * v
        return UnivariatePoly(out)

    __rmul__ = __mul__

    def deriv(self) -> UnivariatePoly:
        return UnivariatePoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Horner evaluation; exact on Fractions, float coefficients on floats/arrays."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        if self._float is None:
            self._float = tuple(float(c) for c in self.coeffs)
        acc = 0.0 * x
        for c in reversed(self._float):
            acc = acc * x + c
        return acc

    def divmod(self, other: UnivariatePoly) -> tuple[UnivariatePoly, UnivariatePoly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading
        quot = [Fraction(0)] * max(len(rem) - dq, 1)
        while len(rem) - 1 >= dq and any(rem):
            shift = len(rem) - 1 - dq
            factor = rem[-1] / lead
            quot[shift] = factor
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= factor * c
            rem = list(_trim(rem))
        return UnivariatePoly(quot), UnivariatePoly(rem)

    def sturm_sequence(self) -> list[UnivariatePoly]:
        seq = [self, self.deriv()]
        while not seq[-1].is_zero():
            _, r = seq[-2].divmod(seq[-1])
            seq.append(-r)
        return seq[:-1]

    def count_roots(self, lo, hi, sturm: list[UnivariatePoly] | None = None) -> int:
        """Number of distinct real roots in the half-open interval ``(lo, hi]``."""
        if self.is_zero():
            raise ValueError("zero polynomial has infinitely many roots")
        seq = sturm or self.sturm_sequence()
        return _sign_changes(seq, as_fraction(lo)) - _sign_changes(seq, as_fraction(hi))

    def count_positive_roots(self) -> int:
        """Distinct roots in ``(0, inf)``."""
        if self.is_zero():
            raise ValueError("zero polynomial has infinitely many roots")
        seq = self.sturm_sequence()
        at_inf = _changes([p.leading for p in seq])
        return _sign_changes(seq, Fraction(0)) - at_inf

    def __repr__(self):
        return f"UnivariatePoly({[str(c) for c in self.coeffs]})"


def _changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _sign_changes(seq: list[UnivariatePoly], x: Fraction) -> int:
    return _changes([p(x) for p in seq])


# ---------------------------------------------------------------------------
# Coefficient recurrence


@dataclass(frozen=True)
class CoefficientTable:
    """Exact C_k, d_k and D_k values for one member of the generalized family.

    ``c[k]`` is C_k for k = 0..n, ``d_small[k-1]`` is d_k for k = 1..n and
    ``big_d[k]`` is D_k = 4 C_k (n-k) - C_{k+1} (k+1) for k = 0..n-1.
    """

    n: int
    c: tuple[int, ...]
    d_small: tuple[int, ...]
    big_d: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.big_d:
            object.__setattr__(self, "big_d", _big_d(self.n, self.c))


def _big_d(n: int, c) -> tuple[int, ...]:
    return tuple(4 * c[k] * (n - k) - c[k + 1] * (k + 1) for k in range(n))


def _check_n(n, cap: int = N_MAX) -> int:
    if isinstance(n, bool) or not isinstance(n, int):
        raise InvalidParameter(f"n must be an integer, got {n!r}")
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    if n > cap:
        raise InvalidParameter(f"n must be <= {cap}, got {n}")
    return n


def d_sequence(n: int) -> tuple[int, ...]:
    """d_1..d_n: d_k = binom(2k, k) - sum_{j<k} binom(2k, k-j) d_j, d_1 = 2."""
    d: list[int] = []
    for k in range(1, n + 1):
        if k == 1:
            d.append(2)
            continue
        d.append(comb(2 * k, k) - sum(comb(2 * k, k - j) * d[j - 1] for j in range(1, k)))
    return tuple(d)


def ck_table(n: int, cap: int = N_MAX) -> CoefficientTable:
    """Run the C_k recurrence for the degree-2n member of the family."""
    _check_n(n, cap)
    c = [1]
    for k in range(1, n + 1):
        s = sum((-1) ** (k - l) * comb(2 * n - 2 * l, k - l) * c[l] for l in range(k))
        c.append((-1) ** k - s)
    return CoefficientTable(n=n, c=tuple(c), d_small=d_sequence(n))


def cn_from_d(d_small) -> int:
    """C_n recomputed from the d-sequence: (-1)^n + (-1)^(n+1) (d_1 + ... + d_n)."""
    n = len(d_small)
    return (-1) ** n + (-1) ** (n + 1) * sum(d_small)


def dk_positivity(table: CoefficientTable) -> tuple[bool, int | None]:
    """Whether every D_k (k = 0..n-1) is positive, with the first failing k."""
    for k, v in enumerate(table.big_d):
        if v <= 0:
            return False, k
    return True, None


# ---------------------------------------------------------------------------
# Levi-Civita pullback and separation

_Q1 = BivariatePoly({(2, 0): 1, (0, 2): -1})  # z1^2 - z2^2
_Q2 = BivariatePoly({(1, 1): 2})  # 2 z1 z2
_R2 = BivariatePoly({(2, 0): 1, (0, 2): 1})  # z1^2 + z2^2


def lc_pullback(G: BivariatePoly) -> BivariatePoly:
    """(z1^2 + z2^2) * G(z1^2 - z2^2, 2 z1 z2), expanded exactly."""
    if G.is_zero():
        return BivariatePoly()
    return _R2 * G.substitute(_Q1, _Q2)


def split_separable(P: BivariatePoly) -> tuple[UnivariatePoly, UnivariatePoly]:
    """Split ``P(z1, z2) = G1(z1) + G2(z2)``; the constant goes to G1.

    Raises :class:`NotSeparable` naming the first mixed monomial found.
    """
    g1: dict[int, Fraction] = {}
    g2: dict[int, Fraction] = {}
    for (e1, e2), c in P.items():
        if e1 > 0 and e2 > 0:
            raise NotSeparable((e1, e2), c)
        if e2 == 0:
            g1[e1] = c
        else:
            g2[e2] = c
    return UnivariatePoly.from_terms(g1), UnivariatePoly.from_terms(g2)


def family_form(n: int, table: CoefficientTable | None = None) -> BivariatePoly:
    """F(q) = sum_k C_k / 4^k * q1^(2n-2k) q2^(2k)."""
    table = table or ck_table(n)
    return BivariatePoly(
        {(2 * n - 2 * k, 2 * k): Fraction(ck, 4**k) for k, ck in enumerate(table.c)}
    )


@dataclass(frozen=True)
class IdentityResult:
    n: int
    ok: bool
    mismatches: dict[Exponent, tuple[Fraction, Fraction]]

    def __bool__(self):
        return self.ok


def poly_identity_check(n: int) -> IdentityResult:
    """Check (z1^2+z2^2) F(z1^2-z2^2, 2z1z2) == z1^(4n+2) + z2^(4n+2) exactly.

    The result also requires the splitter to return the two pure powers.
    """
    _check_n(n)
    pulled = lc_pullback(family_form(n))
    target = BivariatePoly({(4 * n + 2, 0): 1, (0, 4 * n + 2): 1})
    keys = set(pulled.terms) | set(target.terms)
    mismatches = {
        k: (pulled.coefficient(*k), target.coefficient(*k))
        for k in sorted(keys)
        if pulled.coefficient(*k) != target.coefficient(*k)
    }
    ok = not mismatches
    if ok:
        g1, g2 = split_separable(pulled)
        expected = UnivariatePoly.from_terms({4 * n + 2: 1})
        ok = g1 == expected and g2 == expected
    return IdentityResult(n=n, ok=ok, mismatches=mismatches)
