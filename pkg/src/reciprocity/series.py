"""Epstein zeta partial sums, splitting-prime Euler products, and identity checks.

Conventions
-----------
* Discriminant d keys the forms; the determinant D = d/4 keys the products and
  symbols, so ``d = 4 * D`` throughout (see :func:`quadform.from_determinant`).
* Indefinite forms are summed over the automorph fundamental domain
  ``y >= 0, U(2ax + by) > 2Ty``: one point per orbit of the automorph group.
* The limit s -> 1 is replaced by evaluations at s = 1 + eps along a decreasing
  schedule and a linear (Richardson) extrapolation through the two smallest eps.
* Reductions use ``math.fsum`` so results are bit-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arithmetic import (
    PRIMES_3_MOD_4,
    is_prime,
    is_square,
    iter_prime_segments,
    legendre_symbols,
    prime_array,
)
from .errors import PreconditionError
from .pell import PellSolution, fundamental_pell
from .quadform import (
    ClassSet,
    Discriminant,
    class_number,
    from_determinant,
    identity_constant,
    lattice_points,
    unit_count,
)

DEFAULT_EPS_SCHEDULE = (0.5, 0.25, 0.125, 0.0625)


@dataclass(frozen=True)
class SeriesParams:
    s: float
    lattice_cutoff: int = 2000
    prime_cutoff: int = 2000
    n_cutoff: int = 2000

    def __post_init__(self) -> None:
        if not self.s > 1:
            raise PreconditionError(f"s must exceed 1, got {self.s}")
        if min(self.lattice_cutoff, self.prime_cutoff, self.n_cutoff) < 1:
            raise PreconditionError("cutoffs must be at least 1")

    def scaled(self, factor: int) -> "SeriesParams":
        return SeriesParams(
            self.s,
            self.lattice_cutoff * factor,
            self.prime_cutoff * factor,
            self.n_cutoff * factor,
        )

    def at(self, s: float) -> "SeriesParams":
        return SeriesParams(s, self.lattice_cutoff, self.prime_cutoff, self.n_cutoff)


@dataclass(frozen=True)
class SeriesEvaluation:
    value: float
    terms_used: int
    tail_bound: float
    tail_rigorous: bool = True


def _as_disc(d: Discriminant | int) -> Discriminant:
    return d if isinstance(d, Discriminant) else Discriminant(d)


def _determinant(d: Discriminant) -> int:
    D = d.determinant
    if D is None:
        raise PreconditionError(f"discriminant {d.d} has no integral determinant")
    return D


# --- lattice sums ---------------------------------------------------------------


def epstein_terms(
    classes: ClassSet,
    lattice_cutoff: int,
    proper_only: bool,
    coprime_to_2D: bool,
    pell: PellSolution | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Distinct values m <= cutoff and how many lattice points give each, over all classes."""
    d = classes.d.d
    if d > 0 and pell is None:
        raise PreconditionError("indefinite sums need the Pell solution for D = d/4")
    merged: dict[int, int] = {}
    for Q in classes.representatives:
        x, y, v = lattice_points(Q, lattice_cutoff, pell=pell if d > 0 else None)
        keep = np.ones(v.size, dtype=bool)
        if proper_only:
            keep &= np.gcd(x, y) == 1
        if coprime_to_2D:
            keep &= np.gcd(v, 2 * abs(d)) == 1
        vals, counts = np.unique(v[keep], return_counts=True)
        for m, c in zip(vals.tolist(), counts.tolist()):
            merged[m] = merged.get(m, 0) + c
    keys = sorted(merged)
    return np.array(keys, dtype=np.int64), np.array([merged[k] for k in keys], dtype=np.int64)


def _power_sum(values: np.ndarray, counts: np.ndarray, s: float) -> float:
    if values.size == 0:
        return 0.0
    return math.fsum((counts * values.astype(np.float64) ** (-s)).tolist())


def epstein_partial(
    classes: ClassSet,
    params: SeriesParams,
    proper_only: bool = False,
    coprime_to_2D: bool = False,
    pell: PellSolution | None = None,
) -> SeriesEvaluation:
    """Sum of Q(x, y)^-s over every class and every counted point with Q(x, y) <= M.

    ``tail_bound`` is the heuristic tail N(M) M^-s / (s - 1), which assumes the
    point count grows linearly past M.
    """
    values, counts = epstein_terms(classes, params.lattice_cutoff, proper_only, coprime_to_2D, pell)
    n = int(counts.sum())
    M = params.lattice_cutoff
    tail = n * M ** (-params.s) / (params.s - 1)
    return SeriesEvaluation(_power_sum(values, counts, params.s), n, tail, tail_rigorous=False)


# --- Euler products -------------------------------------------------------------


def splitting_primes(D: int, prime_cutoff: int) -> np.ndarray:
    """Primes p <= cutoff, p not dividing 2D, with (D/p) = +1."""
    if is_square(D):
        raise PreconditionError(f"D={D} is a perfect square")
    primes = prime_array(3, prime_cutoff)
    primes = primes[D % primes != 0]
    return primes[legendre_symbols(D, primes) == 1]


def _log_factors(primes: np.ndarray, s: float) -> np.ndarray:
    u = primes.astype(np.float64) ** (-s)
    return np.log1p(u) - np.log1p(-u)


def _product_tail_bound(P: int, s: float) -> float:
    """Bound on log of the omitted factors: sum_{n > P} 2u/(1 - u^2), u = n^-s."""
    u = (P + 1) ** (-s)
    return 2.0 / (1.0 - u * u) * P ** (1 - s) / (s - 1)


def splitting_euler_product(D: int, params: SeriesParams) -> SeriesEvaluation:
    """Product of (1 + p^-s)/(1 - p^-s) over splitting primes p <= P."""
    primes = splitting_primes(D, params.prime_cutoff)
    log_value = math.fsum(_log_factors(primes, params.s).tolist())
    value = math.exp(log_value)
    tail = value * math.expm1(_product_tail_bound(params.prime_cutoff, params.s))
    return SeriesEvaluation(value, int(primes.size), tail)


def restricted_zeta(D: int, s2: float, n_cutoff: int) -> float:
    """Sum of n^-s2 over n <= N with gcd(n, 2D) = 1."""
    n = np.arange(1, n_cutoff + 1, dtype=np.int64)
    n = n[np.gcd(n, 2 * abs(D)) == 1]
    return math.fsum((n.astype(np.float64) ** (-s2)).tolist())


@dataclass(frozen=True)
class ExpansionCheck:
    series: float
    product: float
    residual: float
    terms: int


def _smooth_numbers(primes: list[int], limit: int) -> list[tuple[int, int]]:
    """(m, mu) for every m <= limit built from ``primes``; mu = distinct primes used."""
    out = [(1, 0)]

    def walk(start: int, m: int, mu: int) -> None:
        for i in range(start, len(primes)):
            p = primes[i]
            q = m * p
            if q > limit:
                break
            while q <= limit:
                out.append((q, mu + 1))
                walk(i + 1, q, mu + 1)
                q *= p

    walk(0, 1, 0)
    return sorted(out)


def dirichlet_series_expansion_check(D: int, params: SeriesParams) -> ExpansionCheck:
    """Compare w * sum 2^mu(m) m^-s (m <= M, built from splitting primes <= P) with w * product."""
    w = unit_count(4 * D)
    primes = splitting_primes(D, params.prime_cutoff).tolist()
    terms = _smooth_numbers(primes, params.lattice_cutoff)
    series = w * math.fsum(2.0**mu * m ** (-params.s) for m, mu in terms)
    product = w * splitting_euler_product(D, params).value
    return ExpansionCheck(series, product, abs(series - product) / product, len(terms))


# --- identities -----------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    d: int
    s: float
    lhs: float
    rhs: float
    residual: float
    k: int
    w: int


def fundamental_identity_check(d: Discriminant | int, params: SeriesParams) -> IdentityCheck:
    """Lattice sum over values prime to 2D versus w * zeta_2D(2s) * splitting product.

    The constant on the right is the unit count w, which agrees with the
    textbook constant k (2 for d < 0, 1 for d > 0) except at d = -4.
    """
    disc = _as_disc(d)
    D = _determinant(disc)
    classes = class_number(disc)
    pell = fundamental_pell(D) if D > 0 else None
    lhs = epstein_partial(classes, params, proper_only=False, coprime_to_2D=True, pell=pell).value
    w = unit_count(disc)
    rhs = w * restricted_zeta(D, 2 * params.s, params.n_cutoff) * splitting_euler_product(D, params).value
    return IdentityCheck(disc.d, params.s, lhs, rhs, abs(lhs - rhs) / rhs, identity_constant(disc), w)


def richardson(eps: tuple[float, float], values: tuple[float, float]) -> float:
    """Value at eps = 0 of the line through two (eps, value) points."""
    (e1, e2), (g1, g2) = eps, values
    return (e1 * g2 - e2 * g1) / (e1 - e2)


def _check_schedule(eps_schedule) -> tuple[float, ...]:
    eps = tuple(float(e) for e in eps_schedule)
    if len(eps) < 2 or any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
        raise PreconditionError("eps schedule must be positive and strictly decreasing, length >= 2")
    return eps


def _monotone(seq) -> bool:
    diffs = [b - a for a, b in zip(seq, seq[1:])]
    return all(x > 0 for x in diffs) or all(x < 0 for x in diffs)


@dataclass(frozen=True)
class ClassFormulaCheck:
    d: int
    h: int
    closed_form: float
    eps: tuple[float, ...]
    scaled_sums: tuple[float, ...]
    monotone: bool
    extrapolated: float | None
    deviation: float | None


def closed_form(d: Discriminant | int) -> float:
    """h pi / sqrt|D| for d < 0, h ln(T + U sqrt D) / (2 sqrt D) for d > 0 (D = d/4)."""
    disc = _as_disc(d)
    h = class_number(disc).h
    if disc.d < 0:
        return h * math.pi / math.sqrt(abs(disc.d) / 4)
    D = _determinant(disc)
    pell = fundamental_pell(D)
    return h * math.log(pell.unit) / (2 * math.sqrt(D))


def class_number_formula_check(
    d: Discriminant | int,
    eps_schedule=DEFAULT_EPS_SCHEDULE,
    lattice_cutoff: int = 10**6,
) -> ClassFormulaCheck:
    """Extrapolate (s - 1) * sum Q(x, y)^-s to s = 1 and compare with the closed form.

    All lattice points count here (no coprimality filter): the limit is the
    area of the region Q <= 1, an ellipse for d < 0 and a hyperbolic sector
    cut out by the automorph domain for d > 0. Each truncated sum is completed
    with the linear-growth tail estimate before scaling. A non-monotone
    sequence of scaled sums is flagged and not extrapolated.
    """
    disc = _as_disc(d)
    eps = _check_schedule(eps_schedule)
    classes = class_number(disc)
    pell = fundamental_pell(_determinant(disc)) if disc.d > 0 else None
    values, counts = epstein_terms(classes, lattice_cutoff, False, False, pell)
    n = int(counts.sum())
    scaled = []
    for e in eps:
        s = 1.0 + e
        partial = _power_sum(values, counts, s)
        tail = n * lattice_cutoff ** (-s) / e
        scaled.append(e * (partial + tail))
    target = closed_form(disc)
    mono = _monotone(scaled)
    if not mono:
        return ClassFormulaCheck(disc.d, classes.h, target, eps, tuple(scaled), False, None, None)
    extrap = richardson(eps[-2:], (scaled[-2], scaled[-1]))
    return ClassFormulaCheck(
        disc.d, classes.h, target, eps, tuple(scaled), True, extrap, abs(extrap - target) / target
    )


@dataclass(frozen=True)
class LSeriesEvaluation(SeriesEvaluation):
    smoothed: float = 0.0


def kronecker_table(D: int, N: int) -> np.ndarray:
    """(D/n) for 0 <= n <= N, zero when gcd(n, 2D) > 1.

    Built multiplicatively from Euler-criterion values at primes, which is the
    Jacobi symbol for odd n.
    """
    chi = np.ones(N + 1, dtype=np.int64)
    chi[0] = 0
    primes = prime_array(2, N)
    odd = primes[primes > 2]
    vals = np.zeros(primes.size, dtype=np.int64)
    vals[primes > 2] = legendre_symbols(D, odd)
    for p, c in zip(primes.tolist(), vals.tolist()):
        if c == 1:
            continue
        pk = p
        while pk <= N:
            if c == 0:
                chi[pk::pk] = 0
            else:
                chi[pk::pk] *= -1
            pk *= p
    return chi


def l_series_crosscheck(d: Discriminant | int, N: int) -> LSeriesEvaluation:
    """Partial sum of (D/n)/n over n <= N prime to 2D.

    ``smoothed`` averages the partial sums over the last full period 4|D| of
    the character, which removes the oscillation of the raw partial sums.
    ``tail_bound`` = 4|D|/(N + 1) bounds the remainder by partial summation.
    """
    if N < 1:
        raise PreconditionError("N must be positive")
    disc = _as_disc(d)
    D = _determinant(disc)
    chi = kronecker_table(D, N)
    n = np.arange(1, N + 1, dtype=np.float64)
    terms = chi[1:] / n
    partial = np.cumsum(terms)
    value = math.fsum(terms.tolist())
    q = min(4 * abs(D), N)
    smoothed = math.fsum(partial[-q:].tolist()) / q
    return LSeriesEvaluation(value, int(np.count_nonzero(chi[1:])), 4 * abs(D) / (N + 1), True, smoothed)


def l_series_target(d: Discriminant | int) -> float:
    """h pi / (2 sqrt|D|) for D < 0; h ln(T + U sqrt D) / (2 sqrt D) for D > 0."""
    disc = _as_disc(d)
    value = closed_form(disc)
    return value / 2 if disc.d < 0 else value


# --- Teege's identity -----------------------------------------------------------


def product_ratio(p: int, s: float, prime_cutoff: int, include_A: bool = True) -> float:
    """prod_{(p/q)=1} f(q) / prod_{(-p/q)=1} f(q), f(q) = (1 + q^-s)/(1 - q^-s).

    With ``include_A=False`` only primes q = 3 (mod 4) enter; for p = 1 (mod 4)
    the q = 1 (mod 4) factors are common to both products, so both settings
    agree.
    """
    num = splitting_primes(p, prime_cutoff)
    den = splitting_primes(-p, prime_cutoff)
    if not include_A:
        num, den = num[num % 4 == 3], den[den % 4 == 3]
    logs = _log_factors(num, s).tolist() + (-_log_factors(den, s)).tolist()
    return math.exp(math.fsum(logs))


@dataclass(frozen=True)
class TeegeCheck:
    p: int
    h_plus: int
    h_minus: int
    pell: PellSolution
    lhs: float
    eps: tuple[float, ...]
    rhs: tuple[float, ...]
    deviations: tuple[float, ...]
    extrapolated: float
    extrapolated_deviation: float


def teege_lhs(p: int) -> tuple[float, int, int, PellSolution]:
    h_plus = class_number(from_determinant(p)).h
    h_minus = class_number(from_determinant(-p)).h
    pell = fundamental_pell(p)
    return h_plus * math.log(pell.unit) / (h_minus * 2 * math.pi), h_plus, h_minus, pell


def teege_identity_check(
    p: int,
    prime_cutoff: int = 10**6,
    eps_schedule=DEFAULT_EPS_SCHEDULE,
) -> TeegeCheck:
    """Both sides of Teege's identity for a prime p = 1 (mod 4).

    Left: h(4p) ln(T + U sqrt p) / (2 pi h(-4p)). Right: the product ratio
    divided by 2 at s = 1 + eps, then extrapolated to eps = 0.
    """
    if not is_prime(p) or p % 4 != 1:
        raise PreconditionError(f"p={p} must be a prime = 1 (mod 4)")
    eps = _check_schedule(eps_schedule)
    lhs, h_plus, h_minus, pell = teege_lhs(p)
    rhs = tuple(product_ratio(p, 1 + e, prime_cutoff) / 2 for e in eps)
    devs = tuple(abs(r - lhs) / lhs for r in rhs)
    extrap = richardson(eps[-2:], rhs[-2:])
    return TeegeCheck(p, h_plus, h_minus, pell, lhs, eps, rhs, devs, extrap, abs(extrap - lhs) / lhs)


# --- divergence -----------------------------------------------------------------


@dataclass(frozen=True)
class DivergenceResult:
    target: float
    cutoff: int | None
    value: float
    minorant: float
    primes_used: int
    complete: bool


_TIE = 1e-9


def _exceeds(primes: list[int], target: float) -> bool:
    """Whether (1/2) prod (B + 1)/(B - 1) > target, exactly when the logs are too close to call."""
    log_value = math.fsum(_log_factors(np.array(primes, dtype=np.int64), 1.0).tolist())
    log_target = math.log(2 * target)
    if abs(log_value - log_target) > _TIE:
        return log_value > log_target
    value = Fraction(1, 2)
    for B in primes:
        value *= Fraction(B + 1, B - 1)
    return value > Fraction(target)


def divergence_witness(target: float, ceiling: int = 10**8) -> DivergenceResult:
    """Least prime cutoff P with (1/2) prod_{B <= P, B = 3 mod 4} (1 + 1/B)/(1 - 1/B) > target.

    Also reports the minorant (1/2) sum 1/B over the same primes. Reaching the
    ceiling returns ``complete=False``; it is never evidence of convergence.
    """
    if not target > 0:
        raise PreconditionError("target must be positive")
    log_target = math.log(2 * target)
    logs: list[float] = []
    recips: list[float] = []
    done: list[int] = []
    for seg in iter_prime_segments(3, ceiling):
        seg = seg[PRIMES_3_MOD_4.mask(seg)]
        if seg.size == 0:
            continue
        lf = _log_factors(seg, 1.0)
        running = math.fsum(logs) + np.cumsum(lf)
        hit = np.flatnonzero(running > log_target - _TIE)
        if hit.size:
            i = int(hit[0])
            # settle near-ties exactly: the product is rational
            while not _exceeds(done + seg[: i + 1].tolist(), target):
                i += 1
                if i == seg.size:
                    break
        if hit.size and i < seg.size:
            logs.extend(lf[: i + 1].tolist())
            recips.extend((1.0 / seg[: i + 1].astype(np.float64)).tolist())
            return DivergenceResult(
                target,
                int(seg[i]),
                0.5 * math.exp(math.fsum(logs)),
                0.5 * math.fsum(recips),
                len(logs),
                True,
            )
        logs.extend(lf.tolist())
        recips.extend((1.0 / seg.astype(np.float64)).tolist())
        done.extend(seg.tolist())
    return DivergenceResult(
        target, None, 0.5 * math.exp(math.fsum(logs)), 0.5 * math.fsum(recips), len(logs), False
    )


def minorant_terms(count: int) -> list[Fraction]:
    """Exact first terms 1/B of the divergent minorant, B = 3 (mod 4) prime."""
    out: list[Fraction] = []
    B = 3
    while len(out) < count:
        if is_prime(B):
            out.append(Fraction(1, B))
        B += 4
    return out

