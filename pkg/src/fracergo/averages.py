"""Multiple ergodic averages along integer parts of fractional-power
iterates, over plain integers or primes, with optional arithmetic
weights.

Everything here is a finite computation reported as-is: exponential
(Weyl) sums, multicorrelation averages with their L^2 distance to a
product benchmark, recurrence profiles for sets of positive measure,
and the prime-weighted experiment that ties norm decay of an average to
a seminorm certificate for one of its observables.

Floors of iterate values are taken exactly.  The fast path is a float
evaluation; any value landing inside a guard band around an integer is
re-done with integer root extraction where the term is rational, and
80-digit arithmetic otherwise.  The band is 1e-9 plus a relative term,
wide enough to cover accumulated float error at values around 1e9.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath
import numpy as np

from .fracpoly import Family, RealExpPoly, family_to_json, is_nice
from .primes import PrimeTable, cube, von_mangoldt_array
from .systems import (
    TERM_BUDGET,
    Cyclic,
    CyclicFunction,
    FourierPoly,
    Rotation,
    Skew,
    SystemSpec,
    _check_observable,
    frac_multiples,
    integrate,
    l2_norm,
)
from .seminorms import hk_seminorm_estimate

__all__ = [
    "IterateSpec",
    "Unweighted",
    "VonMangoldt",
    "DeltaVonMangoldt",
    "Bounded",
    "WeightSpec",
    "MultiAverage",
    "RecurrenceProfile",
    "ExperimentResult",
    "InvariantViolation",
    "iterate_value",
    "iterate_values",
    "weight_values",
    "weyl_sum",
    "multi_average",
    "recurrence_profile",
    "delta_average_experiment",
    "cfprime_experiment",
    "vdc_inequality_check",
    "l_n",
]

GUARD_ABS = 1e-9
GUARD_REL = 1e-12


class InvariantViolation(RuntimeError):
    """A quantity that must hold by proof failed numerically."""


@dataclass(frozen=True)
class IterateSpec:
    """A single iterate sequence: floor of a parameter-free function of
    t, evaluated at n itself or at the n-th prime."""

    poly: RealExpPoly
    mode: str = "integers"

    def __post_init__(self):
        if self.poly.k != 0:
            raise ValueError("iterate functions take no shift parameters")
        if self.poly.is_constant_in_t():
            raise ValueError("iterate function is constant")
        if self.mode not in ("integers", "primes"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def describe(self) -> dict:
        return {"function": str(self.poly), "mode": self.mode}


# Weights attached to the averaging index n.  All are evaluated at the
# summation index itself, also in primes mode where the iterate argument
# is p_n: the weight stays a function of n.

@dataclass(frozen=True)
class Unweighted:
    pass


@dataclass(frozen=True)
class VonMangoldt:
    """Restriction of the von Mangoldt function to the primes: log n on
    primes, 0 elsewhere.  Never renormalized; its mean tending to 1 is
    part of what the experiments watch."""


@dataclass(frozen=True)
class DeltaVonMangoldt:
    """Product of the prime von Mangoldt weight over a cube of shifts."""

    shifts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "shifts", tuple(int(h) for h in self.shifts))


@dataclass(frozen=True)
class Bounded:
    """An explicit bounded sequence, extended cyclically past its end."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("empty weight sequence")
        object.__setattr__(self, "values", vals)


WeightSpec = Union[Unweighted, VonMangoldt, DeltaVonMangoldt, Bounded]


def _describe_weight(w: WeightSpec) -> str:
    if isinstance(w, Unweighted):
        return "none"
    if isinstance(w, VonMangoldt):
        return "lambda"
    if isinstance(w, DeltaVonMangoldt):
        return "delta:" + ",".join(str(h) for h in w.shifts)
    return f"bounded[{len(w.values)}]"


def weight_values(weight: WeightSpec, N: int, table: Optional[PrimeTable] = None) -> np.ndarray:
    """The weight sequence at n = 1, ..., N as a float array."""
    if isinstance(weight, Unweighted):
        return np.ones(N)
    if isinstance(weight, Bounded):
        reps = -(-N // len(weight.values))
        return np.tile(np.asarray(weight.values), reps)[:N]
    if table is None:
        raise ValueError("prime-based weights need a sieve table")
    if isinstance(weight, VonMangoldt):
        if table.limit < N:
            raise ValueError(f"sieve covers {table.limit}, need {N}")
        return von_mangoldt_array(table, N)[1 : N + 1]
    # DeltaVonMangoldt: product of shifted copies over the cube of the
    # shift tuple (with multiplicity: a repeated subset sum squares its
    # factor).  An empty tuple degenerates to the plain weight.
    offsets = sorted(cube(weight.shifts))
    if offsets[0] < 0:
        raise ValueError("cube weights need non-negative shift sums")
    top = N + offsets[-1]
    if table.limit < top:
        raise ValueError(f"sieve covers {table.limit}, need {top}")
    lam = von_mangoldt_array(table, top)
    out = np.ones(N)
    for off in offsets:
        out *= lam[1 + off : N + 1 + off]
    return out


# ---------------------------------------------------------------------------
# Exact floors

def _iroot_floor(n: int, q: int) -> int:
    """Integer floor of n^(1/q) by Newton from above."""
    if n < 0:
        raise ValueError("negative radicand")
    if n == 0:
        return 0
    r = 1 << -(-n.bit_length() // q)
    while True:
        nr = ((q - 1) * r + n // r ** (q - 1)) // q
        if nr >= r:
            return r
        r = nr


def _exact_power(x: int, exp: Fraction) -> Optional[Fraction]:
    """x^exp as a rational, when it is one (x a positive integer)."""
    p, q = exp.numerator, exp.denominator
    xp = x**p
    r = _iroot_floor(xp, q)
    if r**q == xp:
        return Fraction(r)
    return None


def _floor_exact(poly: RealExpPoly, x: int) -> int:
    """Floor of poly(x) with no float in the loop.

    Rational-valued terms accumulate in a Fraction; genuinely irrational
    terms fall through to 90-digit arithmetic.  A total that is secretly
    an exact integer despite irrational terms would need an algebraic
    cancellation the corpus does not contain; at 90 digits the floor is
    safe far beyond the guard band that routed us here.
    """
    exact = Fraction(0)
    leftover = []
    for exp, coeff in poly.terms:
        c = coeff.evaluate(())
        if c == 0:
            continue
        if exp == 0:
            exact += c
            continue
        r = _exact_power(x, exp)
        if r is not None:
            exact += c * r
        else:
            leftover.append((c, exp))
    if not leftover:
        return math.floor(exact)
    with mpmath.workdps(90):
        total = mpmath.mpf(exact.numerator) / exact.denominator
        for c, exp in leftover:
            term = mpmath.power(x, mpmath.mpf(exp.numerator) / exp.denominator)
            total += mpmath.mpf(c.numerator) / c.denominator * term
        return int(mpmath.floor(total))


def iterate_value(spec: IterateSpec, n: int, table: Optional[PrimeTable] = None) -> int:
    """The n-th term of the iterate sequence, floored exactly."""
    if n < 1:
        raise ValueError("index starts at 1")
    if spec.mode == "primes":
        if table is None:
            raise ValueError("primes mode needs a sieve table")
        x = table.nth_prime(n)
    else:
        x = n
    return _floor_exact(spec.poly, x)


def _argument_values(spec: IterateSpec, ns: np.ndarray, table: Optional[PrimeTable]) -> np.ndarray:
    if len(ns) and ns.min() < 1:
        raise ValueError("indices start at 1")
    if spec.mode == "primes":
        if table is None:
            raise ValueError("primes mode needs a sieve table")
        if len(ns) and ns.max() > len(table.primes):
            raise ValueError(f"sieve holds {len(table.primes)} primes, need index {ns.max()}")
        return table.primes[ns - 1]
    return ns


def _float_values(poly: RealExpPoly, xs: np.ndarray) -> np.ndarray:
    vals = np.zeros(len(xs))
    xf = xs.astype(np.float64)
    for exp, coeff in poly.terms:
        c = float(coeff.evaluate(()))
        if c != 0.0:
            vals += c * xf ** float(exp)
    return vals


def iterate_values(
    spec: IterateSpec, ns: Sequence[int], table: Optional[PrimeTable] = None
) -> np.ndarray:
    """Vectorized iterate values: float evaluation with an exact re-do
    of every entry inside the guard band around an integer."""
    ns = np.asarray(ns, dtype=np.int64)
    xs = _argument_values(spec, ns, table)
    vals = _float_values(spec.poly, xs)
    out = np.floor(vals).astype(np.int64)
    band = GUARD_ABS + np.abs(vals) * GUARD_REL
    risky = np.flatnonzero(np.abs(vals - np.rint(vals)) < band)
    for i in risky:
        out[i] = _floor_exact(spec.poly, int(xs[i]))
    return out


# ---------------------------------------------------------------------------
# Weyl sums

def weyl_sum(
    family: Sequence[IterateSpec],
    ts: Sequence[float],
    N: int,
    table: Optional[PrimeTable] = None,
    floor_iterates: bool = True,
) -> complex:
    """(1/N) sum of e(sum_i t_i * a_i(n)) with a_i floored by default.

    With flooring off the phases use the raw real values instead; that
    variant is what the distinct-fractional-power criterion needs at
    t = 1, where floored phases are identically zero.
    """
    if len(ts) != len(family):
        raise ValueError("one frequency per iterate")
    if N < 1:
        raise ValueError("empty average")
    modes = {spec.mode for spec in family}
    if len(modes) > 1:
        raise ValueError("iterates must share a mode")
    ns = np.arange(1, N + 1, dtype=np.int64)
    phases = np.zeros(N)
    for spec, t in zip(family, ts):
        t = float(t)
        if t == 0.0:
            continue
        if floor_iterates:
            js = iterate_values(spec, ns, table)
            phases += frac_multiples(t, js.tolist())
        else:
            phases += _float_values(spec.poly, _argument_values(spec, ns, table)) * t
    return complex(np.mean(np.exp(2j * np.pi * phases)))


# ---------------------------------------------------------------------------
# Multicorrelation averages

@dataclass(frozen=True)
class MultiAverage:
    """A finite multicorrelation average: the averaged observable, its
    L^2 distance to the product benchmark, and the benchmark itself."""

    average: object
    distance: float
    benchmark: complex


def _gather_iterates(
    iterates: Sequence[IterateSpec], N: int, table: Optional[PrimeTable]
) -> list[np.ndarray]:
    ns = np.arange(1, N + 1, dtype=np.int64)
    return [iterate_values(spec, ns, table) for spec in iterates]


def _product_benchmark(sys, functions, weight) -> complex:
    if isinstance(weight, DeltaVonMangoldt):
        return 0j
    b = 1 + 0j
    for f in functions:
        b *= integrate(sys, f)
    return b


def _combo_budget(functions, budget: int) -> None:
    n = 1
    for f in functions:
        n *= len(f.terms)
    if n > budget:
        raise ValueError(f"product of observables has {n} term combinations, budget {budget}")


def multi_average(
    sys: SystemSpec,
    iterates: Sequence[IterateSpec],
    functions: Sequence,
    weight: WeightSpec,
    N: int,
    table: Optional[PrimeTable] = None,
    budget: int = TERM_BUDGET,
) -> MultiAverage:
    """(1/N) sum_n w(n) * prod_i T^{a_i(n)} f_i, exactly accumulated in
    the system's own representation, with its L^2 distance to the
    product of integrals (zero for cube-difference weights).
    """
    if len(iterates) != len(functions):
        raise ValueError("one observable per iterate")
    if not iterates:
        raise ValueError("empty average")
    if N < 1:
        raise ValueError("empty average")
    for f in functions:
        _check_observable(sys, f)
    w = weight_values(weight, N, table)
    J = _gather_iterates(iterates, N, table)
    if isinstance(sys, Cyclic):
        avg = _avg_cyclic(sys, J, functions, w)
        bench = _product_benchmark(sys, functions, weight)
        dist = math.sqrt(
            sum(abs(v - bench) ** 2 for v in avg.values) / sys.m
        )
    else:
        _combo_budget(functions, budget)
        if isinstance(sys, Rotation):
            avg = _avg_rotation(sys, J, functions, w)
        else:
            avg = _avg_skew(sys, J, functions, w)
        bench = _product_benchmark(sys, functions, weight)
        dist = _dist_to_const(avg, bench)
    return MultiAverage(avg, dist, bench)


def _dist_to_const(poly: FourierPoly, c: complex) -> float:
    total = abs(c - poly.amplitude((0,) * poly.dim)) ** 2
    for freq, a in poly.terms:
        if any(freq):
            total += abs(a) ** 2
    return math.sqrt(total)


def _avg_cyclic(sys: Cyclic, J, functions, w) -> CyclicFunction:
    m = sys.m
    arrays = [np.asarray(f.as_array()) for f in functions]
    shifts = [np.mod(j, m) for j in J]
    N = len(w)
    out = []
    for x in range(m):
        prod = np.ones(N, dtype=complex)
        for arr, j in zip(arrays, shifts):
            prod *= arr[(x + j) % m]
        out.append(complex(np.sum(w * prod) / N))
    return CyclicFunction.make(m, out)


def _phase_base(alpha: float, js: np.ndarray) -> np.ndarray:
    """Fractional parts of js * alpha, exact per entry.

    Integer multiples of the base stay accurate: frequencies k scale the
    rounded value by at most |k| ulps, far below phase tolerances.
    """
    return frac_multiples(alpha, js.tolist())


def _avg_rotation(sys: Rotation, J, functions, w) -> FourierPoly:
    N = len(w)
    bases = [_phase_base(sys.alpha, j) for j in J]
    acc: dict[tuple[int, ...], complex] = {}
    for combo in itertools.product(*[f.terms for f in functions]):
        freq = sum(k for (k,), _ in combo)
        amp = 1 + 0j
        phase = np.zeros(N)
        for ((k,), a), base in zip(combo, bases):
            amp *= a
            if k:
                phase += (k * base) % 1.0
        val = amp * complex(np.sum(w * np.exp(2j * np.pi * phase))) / N
        key = (freq,)
        acc[key] = acc.get(key, 0j) + val
    return FourierPoly.make(1, acc)


def _avg_skew(sys: Skew, J, functions, w) -> FourierPoly:
    N = len(w)
    lin = [_phase_base(sys.alpha, j) for j in J]
    # Triangular numbers overflow int64 for large iterates; Python ints
    # feed the exact reduction directly.
    tri = [
        frac_multiples(sys.alpha, [x * (x - 1) // 2 for x in j.tolist()]) for j in J
    ]
    jarr = [j.astype(np.int64) for j in J]
    acc: dict[tuple[int, int], np.ndarray] = {}
    for combo in itertools.product(*[f.terms for f in functions]):
        amp = 1 + 0j
        f1 = np.zeros(N, dtype=np.int64)
        f2 = 0
        phase = np.zeros(N)
        for ((k1, k2), a), bl, bt, j in zip(combo, lin, tri, jarr):
            amp *= a
            f1 += k1 + j * k2
            f2 += k2
            if k1:
                phase += (k1 * bl) % 1.0
            if k2:
                phase += (k2 * bt) % 1.0
        contrib = amp * w * np.exp(2j * np.pi * phase) / N
        uniq, inv = np.unique(f1, return_inverse=True)
        sums = np.zeros(len(uniq), dtype=complex)
        np.add.at(sums, inv, contrib)
        for u, s in zip(uniq.tolist(), sums.tolist()):
            key = (u, f2)
            acc[key] = acc.get(key, 0j) + s
    return FourierPoly.make(2, acc)


# ---------------------------------------------------------------------------
# Recurrence profiles

@dataclass(frozen=True)
class RecurrenceProfile:
    """Correlation of a set (or [0,1]-valued function) with its own
    shifted copies along the iterates, per average length, next to the
    measure^(l+1) benchmark the limit theory predicts as a floor."""

    series: tuple[tuple[int, float], ...]
    benchmark: float

    def __post_init__(self):
        lengths = [n for n, _ in self.series]
        if any(b <= a for a, b in zip(lengths, lengths[1:])):
            raise ValueError("average lengths must increase")


def recurrence_profile(
    sys: SystemSpec,
    g,
    iterates: Sequence[IterateSpec],
    N_list: Sequence[int],
    table: Optional[PrimeTable] = None,
) -> RecurrenceProfile:
    """mu(g and T^{-a_1(n)}g and ...) averaged over n <= N, for each N.

    Cyclic systems take any number of iterates; the rotation supports
    one or two (the correlation is expanded in coefficients, and the
    pair case already needs a quadratic sweep).  The skew frame mixes
    frequencies under iteration in a way this expansion does not cover,
    so it is rejected here.
    """
    if not iterates:
        raise ValueError("need at least one iterate")
    N_list = [int(n) for n in N_list]
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("average lengths must increase")
    if isinstance(sys, Skew):
        raise ValueError("recurrence profiles are not implemented on the skew system")
    _check_observable(sys, g)
    _require_real(sys, g)
    mu = integrate(sys, g)
    bench = mu.real ** (len(iterates) + 1)
    Nmax = max(N_list)
    J = _gather_iterates(iterates, Nmax, table)
    series = []
    for N in N_list:
        Jn = [j[:N] for j in J]
        if isinstance(sys, Cyclic):
            val = _recur_cyclic(sys, g, Jn)
        else:
            val = _recur_rotation(sys, g, Jn)
        series.append((N, val))
    return RecurrenceProfile(tuple(series), bench)


def _require_real(sys: SystemSpec, g) -> None:
    if isinstance(sys, Cyclic):
        if any(abs(v.imag) > 1e-12 for v in g.values):
            raise ValueError("recurrence needs a real-valued g")
        return
    for (k,), a in g.terms:
        if abs(np.conj(a) - g.amplitude((-k,))) > 1e-12:
            raise ValueError("recurrence needs a real-valued g")


def _recur_cyclic(sys: Cyclic, g: CyclicFunction, J) -> float:
    m = sys.m
    arr = g.as_array()
    N = len(J[0])
    shifts = [np.mod(j, m) for j in J]
    total = 0.0
    for x in range(m):
        prod = np.ones(N)
        for j in shifts:
            prod *= arr[(x - j) % m].real
        total += arr[x].real * prod.mean()
    return total / m


def _recur_rotation(sys: Rotation, g: FourierPoly, J) -> float:
    # Expand integral(g * prod_i T^{-j_i} g) over coefficient
    # combinations whose frequencies cancel, with T^{-j} contributing
    # e(-k j alpha) on the frequency-k component.
    coeffs = {k: a for (k,), a in g.terms}
    bases = [_phase_base(sys.alpha, j) for j in J]
    N = len(J[0])
    if len(J) == 1:
        total = 0j
        for k, a in coeffs.items():
            a0 = coeffs.get(-k)
            if a0 is None:
                continue
            mean = complex(np.mean(np.exp(-2j * np.pi * ((k * bases[0]) % 1.0))))
            total += a0 * a * mean
        return total.real
    if len(J) == 2:
        total = 0j
        chunk = 1 << 14
        ks = np.asarray(sorted(coeffs))
        G = np.zeros((len(ks), len(ks)), dtype=complex)
        for lo in range(0, N, chunk):
            hi = min(lo + chunk, N)
            M1 = np.exp(-2j * np.pi * np.outer(ks, bases[0][lo:hi]))
            M2 = np.exp(-2j * np.pi * np.outer(ks, bases[1][lo:hi]))
            G += M1 @ M2.T
        G /= N
        for i, k1 in enumerate(ks.tolist()):
            for j2, k2 in enumerate(ks.tolist()):
                a0 = coeffs.get(-(k1 + k2))
                if a0 is None:
                    continue
                total += a0 * coeffs[k1] * coeffs[k2] * G[i, j2]
        return total.real
    raise ValueError("rotation recurrence supports at most two iterates")


# ---------------------------------------------------------------------------
# Experiments

@dataclass(frozen=True)
class ExperimentResult:
    series: tuple[tuple[int, float], ...]
    metadata: dict
    wall_time: float

    def __post_init__(self):
        lengths = [n for n, _ in self.series]
        if any(b <= a for a, b in zip(lengths, lengths[1:])):
            raise ValueError("average lengths must increase")


def l_n(N: int) -> int:
    """Slowly growing shift range floor(exp(sqrt(log N)))."""
    if N < 1:
        raise ValueError("length must be positive")
    return math.floor(math.exp(math.sqrt(math.log(N))))


def delta_average_experiment(
    sys: SystemSpec,
    iterates: Sequence[IterateSpec],
    functions: Sequence,
    k: int,
    N_list: Sequence[int],
    table: Optional[PrimeTable] = None,
) -> ExperimentResult:
    """Cube-difference averages with the shift tuple swept over
    [l_n(N)]^k: the L^2 norm sits inside the shift average, not outside,
    and the benchmark is zero.
    """
    if k < 1:
        raise ValueError("need at least one shift coordinate")
    t0 = time.monotonic()
    series = []
    for N in N_list:
        L = l_n(N)
        dists = []
        for shifts in itertools.product(range(1, L + 1), repeat=k):
            r = multi_average(sys, iterates, functions, DeltaVonMangoldt(shifts), N, table)
            dists.append(r.distance)
        series.append((int(N), float(np.mean(dists))))
    meta = {
        "kind": "delta_average",
        "system": _describe_system(sys),
        "iterates": [s.describe() for s in iterates],
        "shift_coordinates": k,
    }
    return ExperimentResult(tuple(series), meta, time.monotonic() - t0)


def cfprime_experiment(
    sys: SystemSpec,
    family: Family,
    functions: Sequence,
    s: int,
    N_list: Sequence[int],
    table: Optional[PrimeTable] = None,
    designated: int = 0,
) -> ExperimentResult:
    """Prime-weighted average norms next to a seminorm certificate.

    The family supplies the iterate exponents (evaluated at the integer
    index, weighted by the prime von Mangoldt function).  One designated
    observable gets a degree-s seminorm estimate recorded in the
    metadata; the series is the L^2 norm of the weighted average at each
    length.  Decay of the series with a small certificate, or no decay
    with a large one, is the pattern the controlling inequality
    predicts.
    """
    funcs = list(functions)
    if len(funcs) != len(family.functions):
        raise ValueError("one observable per family member")
    if not is_nice(family):
        raise ValueError("the iterate family must be nice")
    for i, a in enumerate(family.functions):
        for b in family.functions[i + 1 :]:
            if (a - b).is_zero():
                raise ValueError("family members must be pairwise distinct")
    if not 0 <= designated < len(funcs):
        raise ValueError("designated index out of range")
    t0 = time.monotonic()
    cert = hk_seminorm_estimate(sys, funcs[designated], s)
    specs = [IterateSpec(f, "integers") for f in family.functions]
    series = []
    for N in N_list:
        r = multi_average(sys, specs, funcs, VonMangoldt(), int(N), table)
        series.append((int(N), l2_norm(r.average)))
    meta = {
        "kind": "prime_weighted_norms",
        "system": _describe_system(sys),
        "family": family_to_json(family),
        "seminorm_degree": s,
        "seminorm_schedule": list(cert.N_schedule),
        "seminorm_value": cert.value,
        "designated": designated,
    }
    return ExperimentResult(tuple(series), meta, time.monotonic() - t0)


def _describe_system(sys: SystemSpec) -> str:
    if isinstance(sys, Cyclic):
        return f"cyclic:{sys.m}"
    if isinstance(sys, Rotation):
        return f"rotation:{sys.alpha!r}"
    return f"skew:{sys.alpha!r}"


# ---------------------------------------------------------------------------
# The finitary van der Corput inequality

def vdc_inequality_check(u: np.ndarray, H: int) -> tuple[float, float]:
    """Both sides of the finitary averaging inequality for a sequence of
    vectors, checked and returned.

    u has shape (N, d): N vectors in C^d.  The left side is the squared
    norm of the mean; the right side is the 2/H leading term plus the
    triangular sum of shifted inner products.  A numerical violation
    beyond 1e-9 raises, since the inequality is unconditional.
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim == 1:
        u = u[:, None]
    if u.ndim != 2 or len(u) == 0:
        raise ValueError("need a nonempty (N, d) array")
    N = len(u)
    if not 1 <= H <= N:
        raise ValueError("window must satisfy 1 <= H <= N")
    mean = u.mean(axis=0)
    lhs = float(np.sum(np.abs(mean) ** 2))
    norms = float(np.mean(np.sum(np.abs(u) ** 2, axis=1)))
    tri = 0.0
    for h in range(1, H):
        inner = complex(np.sum(u[h:] * np.conj(u[:-h]))) / N
        tri += (1 - h / H) * inner.real
    rhs = 2.0 / H * norms + 4.0 / H * tri
    if lhs > rhs + 1e-9:
        raise InvariantViolation(f"averaging inequality violated: {lhs} > {rhs}")
    return lhs, rhs
