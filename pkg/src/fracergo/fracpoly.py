"""Exact symbolic calculus for polynomials with real (rational) exponents.

The objects here are finite sums

    a(h_1, ..., h_k, t) = sum_j p_j(h_1, ..., h_k) * t^(d_j)

where the exponents d_j are non-negative rationals and the coefficients
p_j are polynomials with rational coefficients in k integer parameters.
Everything degree-, equivalence- and type-related reduces to exact
zero-tests of the coefficient polynomials, so all arithmetic is done in
``fractions.Fraction``; floats only ever appear in ``eval``.

On top of the arithmetic sits the reduction calculus: parameter-shift
expansion (``taylor_shift``), the difference operation ``vdc_op``, the
complexity measure ``type_vector`` and the induction driver
``pet_reduce`` which repeatedly rewrites a family until every member has
fractional degree below one, recording a step-by-step certificate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import mpmath

RationalLike = Union[int, str, Fraction]

__all__ = [
    "ParamPolynomial",
    "RealExpPoly",
    "Family",
    "TypeVector",
    "PetStep",
    "PetTrace",
    "PetError",
    "const_poly",
    "param_poly",
    "rexp_poly",
    "equivalent",
    "is_nice",
    "taylor_shift",
    "vdc_op",
    "type_vector",
    "type_lt",
    "choose_a",
    "pet_reduce",
    "family_to_json",
    "family_from_json",
    "trace_to_json",
]


class PetError(RuntimeError):
    """The reduction engine reached a state its own invariants forbid."""


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


@dataclass(frozen=True)
class ParamPolynomial:
    """A polynomial with rational coefficients in k integer parameters.

    ``monomials`` maps each power vector (one exponent per parameter) to
    its nonzero coefficient; the representation is canonical, so the
    zero polynomial is the empty tuple and equality is structural.
    """

    k: int
    monomials: tuple[tuple[tuple[int, ...], Fraction], ...]

    @staticmethod
    def make(k: int, entries: Mapping[tuple[int, ...], RationalLike]) -> "ParamPolynomial":
        canon: dict[tuple[int, ...], Fraction] = {}
        for powers, c in entries.items():
            powers = tuple(int(p) for p in powers)
            if len(powers) != k:
                raise ValueError(f"power vector {powers} does not have {k} entries")
            if any(p < 0 for p in powers):
                raise ValueError(f"negative parameter power in {powers}")
            c = _as_fraction(c)
            if c != 0:
                canon[powers] = canon.get(powers, Fraction(0)) + c
        items = tuple(sorted((p, c) for p, c in canon.items() if c != 0))
        return ParamPolynomial(k, items)

    @staticmethod
    def zero(k: int) -> "ParamPolynomial":
        return ParamPolynomial(k, ())

    @staticmethod
    def constant(k: int, c: RationalLike) -> "ParamPolynomial":
        return ParamPolynomial.make(k, {(0,) * k: c})

    def is_zero(self) -> bool:
        return not self.monomials

    def __add__(self, other: "ParamPolynomial") -> "ParamPolynomial":
        if self.k != other.k:
            raise ValueError("parameter-count mismatch")
        merged = dict(self.monomials)
        for powers, c in other.monomials:
            merged[powers] = merged.get(powers, Fraction(0)) + c
        return ParamPolynomial.make(self.k, merged)

    def __neg__(self) -> "ParamPolynomial":
        return ParamPolynomial(self.k, tuple((p, -c) for p, c in self.monomials))

    def __sub__(self, other: "ParamPolynomial") -> "ParamPolynomial":
        return self + (-other)

    def scale(self, c: RationalLike) -> "ParamPolynomial":
        c = _as_fraction(c)
        if c == 0:
            return ParamPolynomial.zero(self.k)
        return ParamPolynomial(self.k, tuple((p, c * coeff) for p, coeff in self.monomials))

    def widen(self, extra: int = 1) -> "ParamPolynomial":
        """Reinterpret over k+extra parameters (new ones unused)."""
        pad = (0,) * extra
        return ParamPolynomial(self.k + extra, tuple((p + pad, c) for p, c in self.monomials))

    def times_last_param_power(self, j: int) -> "ParamPolynomial":
        """Multiply by (last parameter)^j."""
        if j == 0:
            return self
        items = []
        for powers, c in self.monomials:
            items.append((powers[:-1] + (powers[-1] + j,), c))
        return ParamPolynomial(self.k, tuple(items))

    def evaluate(self, h: Sequence[int]) -> Fraction:
        if len(h) != self.k:
            raise ValueError(f"expected {self.k} parameter values, got {len(h)}")
        total = Fraction(0)
        for powers, c in self.monomials:
            term = c
            for base, p in zip(h, powers):
                if p:
                    term *= Fraction(base) ** p
            total += term
        return total

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        parts = []
        for powers, c in self.monomials:
            vars_part = "".join(
                f"h{i+1}" + (f"^{p}" if p > 1 else "")
                for i, p in enumerate(powers)
                if p > 0
            )
            if not vars_part:
                parts.append(str(c))
            elif c == 1:
                parts.append(vars_part)
            elif c == -1:
                parts.append(f"-{vars_part}")
            else:
                parts.append(f"{c}*{vars_part}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


@dataclass(frozen=True)
class RealExpPoly:
    """sum_j p_j(h) * t^(d_j) with exact rational exponents d_j >= 0.

    Terms are keyed by exponent, stored in decreasing exponent order,
    and never carry an identically-zero coefficient polynomial; the zero
    polynomial has no terms at all.
    """

    k: int
    terms: tuple[tuple[Fraction, ParamPolynomial], ...]

    @staticmethod
    def make(k: int, entries: Mapping[RationalLike, ParamPolynomial]) -> "RealExpPoly":
        canon: dict[Fraction, ParamPolynomial] = {}
        for exp, coeff in entries.items():
            exp = _as_fraction(exp)
            if exp < 0:
                raise ValueError(f"negative exponent {exp}")
            if coeff.k != k:
                raise ValueError("coefficient parameter-count mismatch")
            if exp in canon:
                canon[exp] = canon[exp] + coeff
            else:
                canon[exp] = coeff
        items = tuple(
            sorted(((e, c) for e, c in canon.items() if not c.is_zero()), reverse=True)
        )
        return RealExpPoly(k, items)

    @staticmethod
    def zero(k: int) -> "RealExpPoly":
        return RealExpPoly(k, ())

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant_in_t(self) -> bool:
        return all(exp == 0 for exp, _ in self.terms)

    def is_fractional(self) -> bool:
        """True iff every term with positive exponent has a non-integer exponent."""
        return all(exp.denominator != 1 for exp, _ in self.terms if exp > 0)

    def fractional_degree(self) -> Fraction:
        """Largest exponent carrying a nonzero coefficient; -1 for the zero polynomial."""
        if not self.terms:
            return Fraction(-1)
        return self.terms[0][0]

    def degree(self) -> int:
        """Integer part of the fractional degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return math.floor(self.terms[0][0])

    def coefficient(self, exp: RationalLike) -> ParamPolynomial:
        exp = _as_fraction(exp)
        for e, c in self.terms:
            if e == exp:
                return c
        return ParamPolynomial.zero(self.k)

    def __add__(self, other: "RealExpPoly") -> "RealExpPoly":
        if self.k != other.k:
            raise ValueError("parameter-count mismatch")
        merged: dict[Fraction, ParamPolynomial] = dict(self.terms)
        for exp, coeff in other.terms:
            if exp in merged:
                merged[exp] = merged[exp] + coeff
            else:
                merged[exp] = coeff
        return RealExpPoly.make(self.k, merged)

    def __neg__(self) -> "RealExpPoly":
        return RealExpPoly(self.k, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "RealExpPoly") -> "RealExpPoly":
        return self + (-other)

    def widen(self, extra: int = 1) -> "RealExpPoly":
        return RealExpPoly(self.k + extra, tuple((e, c.widen(extra)) for e, c in self.terms))

    def eval(self, h: Sequence[int], t: float) -> float:
        """Numeric value at integer parameters h and real t > 0.

        Coefficients are evaluated exactly as rationals; only the final
        t-power combination is floating point.
        """
        if t <= 0:
            raise ValueError(f"t must be positive, got {t}")
        total = 0.0
        for exp, coeff in self.terms:
            c = coeff.evaluate(h)
            if c != 0:
                total += float(c) * float(t) ** float(exp)
        return total

    def eval_mpf(self, h: Sequence[int], t, prec: int = 80) -> mpmath.mpf:
        """Like ``eval`` but in mpmath arithmetic at ``prec`` decimal digits."""
        if t <= 0:
            raise ValueError(f"t must be positive, got {t}")
        with mpmath.workdps(prec):
            total = mpmath.mpf(0)
            tm = mpmath.mpf(t)
            for exp, coeff in self.terms:
                c = coeff.evaluate(h)
                if c != 0:
                    e = mpmath.mpf(exp.numerator) / exp.denominator
                    total += mpmath.mpf(c.numerator) / c.denominator * tm ** e
            return +total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp, coeff in self.terms:
            if exp == 0:
                parts.append(f"({coeff})")
            else:
                e = str(exp) if exp.denominator > 1 else str(exp.numerator)
                if coeff.monomials == ParamPolynomial.constant(self.k, 1).monomials:
                    parts.append(f"t^({e})")
                elif coeff.monomials == ParamPolynomial.constant(self.k, -1).monomials:
                    parts.append(f"-t^({e})")
                elif len(coeff.monomials) == 1:
                    parts.append(f"{coeff}*t^({e})")
                else:
                    parts.append(f"({coeff})*t^({e})")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


@dataclass(frozen=True)
class Family:
    """An ordered, nonempty list of RealExpPoly sharing one parameter count."""

    functions: tuple[RealExpPoly, ...]

    def __post_init__(self):
        if not self.functions:
            raise ValueError("empty family")
        k = self.functions[0].k
        if any(f.k != k for f in self.functions):
            raise ValueError("family members disagree on parameter count")

    @property
    def k(self) -> int:
        return self.functions[0].k

    def __len__(self) -> int:
        return len(self.functions)

    def __getitem__(self, i: int) -> RealExpPoly:
        return self.functions[i]

    def __iter__(self):
        return iter(self.functions)

    def max_fractional_degree(self) -> Fraction:
        return max(f.fractional_degree() for f in self.functions)


# ---------------------------------------------------------------------------
# construction helpers, mainly for tests and the CLI

def const_poly(k: int, c: RationalLike) -> ParamPolynomial:
    return ParamPolynomial.constant(k, c)


def param_poly(k: int, entries: Mapping[tuple[int, ...], RationalLike]) -> ParamPolynomial:
    return ParamPolynomial.make(k, entries)


def rexp_poly(k: int, terms: Mapping[RationalLike, object]) -> RealExpPoly:
    """Build a RealExpPoly from {exponent: coefficient} where the
    coefficient may be a rational (meaning a constant), a power-vector
    mapping, or a ready ParamPolynomial."""
    canon: dict[RationalLike, ParamPolynomial] = {}
    for exp, coeff in terms.items():
        if isinstance(coeff, ParamPolynomial):
            canon[exp] = coeff
        elif isinstance(coeff, Mapping):
            canon[exp] = ParamPolynomial.make(k, coeff)
        else:
            canon[exp] = ParamPolynomial.constant(k, coeff)
    return RealExpPoly.make(k, canon)


# ---------------------------------------------------------------------------
# the calculus

def equivalent(a: RealExpPoly, b: RealExpPoly) -> bool:
    """True iff deg(a) = deg(b) and deg(a - b) is strictly smaller."""
    if a.k != b.k:
        raise ValueError("parameter-count mismatch")
    da, db = a.degree(), b.degree()
    if da != db:
        return False
    return (a - b).degree() < da


def is_nice(fam: Family) -> bool:
    """First member has maximal fractional degree; every member and every
    difference from the first is non-constant in t."""
    first = fam[0]
    d1 = first.fractional_degree()
    if any(f.fractional_degree() > d1 for f in fam):
        return False
    if any(f.is_constant_in_t() for f in fam):
        return False
    return all(not (first - f).is_constant_in_t() for f in fam.functions[1:])


def is_fractional_family(fam: Family) -> bool:
    return all(f.is_fractional() for f in fam)


def taylor_shift(f: RealExpPoly) -> RealExpPoly:
    """Expansion of f(h, t + h_new) through order deg(f) in a new last
    parameter, with the negligible remainder dropped.

    The j-th derivative of t^e contributes e(e-1)...(e-j+1) t^(e-j), so
    all new coefficients stay rational.  Terms whose exponent would go
    negative belong to the remainder and are excluded.
    """
    d = max(f.degree(), 0)
    k1 = f.k + 1
    out: dict[Fraction, ParamPolynomial] = {}
    inv_fact = Fraction(1)
    for j in range(d + 1):
        if j > 0:
            inv_fact /= j
        for exp, coeff in f.terms:
            if exp - j < 0:
                continue
            fall = Fraction(1)
            for i in range(j):
                fall *= exp - i
            if fall == 0:
                continue
            c = coeff.widen().times_last_param_power(j).scale(fall * inv_fact)
            key = exp - j
            out[key] = out[key] + c if key in out else c
    return RealExpPoly.make(k1, out)


def vdc_op(fam: Family, index: int) -> Family:
    """Difference family for anchor ``fam[index-1]`` (1-based index).

    Lists the shifted differences then the plain differences,

        a~_1 - a, ..., a~_l - a,  a_1 - a, ..., a_l - a,

    removes every function that is constant in t, and keeps a single
    representative of exactly-equal entries (first occurrence wins).
    """
    if not 1 <= index <= len(fam):
        raise ValueError(f"anchor index {index} outside 1..{len(fam)}")
    anchor = fam[index - 1].widen()
    candidates = [taylor_shift(f) - anchor for f in fam]
    candidates += [f.widen() - anchor for f in fam]
    out: dict[RealExpPoly, None] = {}
    for g in candidates:
        if not g.is_constant_in_t():
            out.setdefault(g, None)
    if not out:
        raise PetError("vdc_op produced an empty family")
    return Family(tuple(out))


@dataclass(frozen=True)
class TypeVector:
    """(d, counts) where counts[i] is the number of equivalence classes
    of degree d - i; lexicographically ordered, d first."""

    d: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != self.d + 1:
            raise ValueError("counts must have d+1 entries")
        if self.counts[0] < 1:
            raise ValueError("no class at the maximal degree")

    def as_tuple(self) -> tuple[int, ...]:
        return (self.d,) + self.counts

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.as_tuple()) + ")"


def type_vector(fam: Family) -> TypeVector:
    """Count equivalence classes per degree, ignoring identically-zero members.

    Two members of common degree d are equivalent exactly when their
    terms of exponent >= d coincide (the difference then has nothing
    left at degree d or above), so each stratum is counted by grouping
    on that leading slice rather than by pairwise comparison.
    """
    members = [f for f in fam if not f.is_zero()]
    if not members:
        raise ValueError("type vector of an all-zero family is undefined")
    d = max(f.degree() for f in members)
    counts = [0] * (d + 1)
    seen: set[tuple] = set()
    for f in members:
        deg = f.degree()
        head = []
        for term in f.terms:
            if term[0] < deg:
                break
            head.append(term)
        key = (deg, tuple(head))
        if key not in seen:
            seen.add(key)
            counts[d - deg] += 1
    return TypeVector(d, tuple(counts))


def type_lt(t1: TypeVector, t2: TypeVector) -> bool:
    return t1.as_tuple() < t2.as_tuple()


def choose_a(fam: Family) -> int:
    """Anchor choice (1-based) for the next reduction step.

    If the members do not all share one fractional degree, pick the
    lowest index in 2..l of minimal fractional degree.  Otherwise pick
    the lowest index maximizing the fractional degree of a~_1 - a_i
    (the descent argument leans on f-deg maximality here, and the
    worked three-member example pins the same reading).  Ties always go
    to the lowest index, so traces are reproducible.
    """
    if not is_nice(fam):
        raise ValueError("anchor choice requires a nice family")
    if not is_fractional_family(fam):
        raise ValueError("anchor choice requires a fractional family")
    if fam[0].fractional_degree() <= 1:
        raise ValueError("family already has fractional degree <= 1")
    degrees = [f.fractional_degree() for f in fam]
    if len(set(degrees)) > 1:
        tail = degrees[1:]
        return 2 + tail.index(min(tail))
    shifted = taylor_shift(fam[0])
    diffs = [(shifted - f.widen()).fractional_degree() for f in fam]
    return 1 + diffs.index(max(diffs))


@dataclass(frozen=True)
class PetStep:
    family_before: Family
    anchor_index: int
    family_after: Family
    type_before: TypeVector
    type_after: TypeVector


@dataclass(frozen=True)
class PetTrace:
    steps: tuple[PetStep, ...]
    final: Family

    def __len__(self) -> int:
        return len(self.steps)


def pet_reduce(fam: Family, max_steps: int = 64) -> PetTrace:
    """Drive the type-descent until the maximal fractional degree drops
    below one, recording each step.

    Exhausting ``max_steps``, losing niceness, or failing to strictly
    decrease the type all raise PetError: termination and descent are
    guaranteed for correct anchor choices, so any violation is a bug in
    the engine, not in the input.
    """
    if not is_nice(fam):
        raise ValueError("pet_reduce requires a nice family")
    if not is_fractional_family(fam):
        raise ValueError("pet_reduce requires a fractional family")
    steps: list[PetStep] = []
    current = fam
    while current.max_fractional_degree() >= 1:
        if len(steps) >= max_steps:
            raise PetError(f"no termination within {max_steps} steps")
        if not is_nice(current):
            raise PetError("intermediate family is not nice")
        if not is_fractional_family(current):
            raise PetError("intermediate family is not fractional")
        idx = choose_a(current)
        after = vdc_op(current, idx)
        t_pre = type_vector(current)
        t_post = type_vector(after)
        if not type_lt(t_post, t_pre):
            raise PetError(f"type did not decrease: {t_pre} -> {t_post}")
        steps.append(PetStep(current, idx, after, t_pre, t_post))
        current = after
    return PetTrace(tuple(steps), current)


# ---------------------------------------------------------------------------
# serialization

def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _coeff_to_json(c: ParamPolynomial) -> list:
    return [{"c": _frac_str(coeff), "powers": list(p)} for p, coeff in c.monomials]


def _poly_to_json(f: RealExpPoly) -> dict:
    return {
        "terms": [
            {"exponent": _frac_str(e), "coeff": _coeff_to_json(c)} for e, c in f.terms
        ]
    }


def family_to_json(fam: Family) -> dict:
    return {"k": fam.k, "functions": [_poly_to_json(f) for f in fam]}


def family_from_json(data: dict) -> Family:
    k = int(data["k"])
    functions = []
    for fn in data["functions"]:
        entries: dict[Fraction, ParamPolynomial] = {}
        for term in fn["terms"]:
            exp = Fraction(term["exponent"])
            coeff = ParamPolynomial.make(
                k, {tuple(m["powers"]): Fraction(m["c"]) for m in term["coeff"]}
            )
            entries[exp] = entries[exp] + coeff if exp in entries else coeff
        functions.append(RealExpPoly.make(k, entries))
    return Family(tuple(functions))


def trace_to_json(trace: PetTrace) -> dict:
    return {
        "steps": [
            {
                "family_before": family_to_json(s.family_before),
                "anchor_index": s.anchor_index,
                "family_after": family_to_json(s.family_after),
                "type_before": list(s.type_before.as_tuple()),
                "type_after": list(s.type_after.as_tuple()),
            }
            for s in trace.steps
        ],
        "final": family_to_json(trace.final),
    }


def load_family(path) -> Family:
    with open(path, "r", encoding="utf-8") as fh:
        return family_from_json(json.load(fh))
