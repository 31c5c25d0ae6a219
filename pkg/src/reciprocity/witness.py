"""Legendre's lemma as a search: witnesses, Teege's descent, Rogers-Selberg sums.

A witness for a prime a = 1 (mod 4) is a prime beta = 3 (mod 4) with
(a/beta) = -1. The lemma guarantees one exists, so every search here that hits
its ceiling raises :class:`SearchExhausted` rather than reporting absence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import (
    DEFAULT_SEGMENT,
    factorize,
    is_prime,
    is_square,
    iter_prime_segments,
    legendre_symbol,
    legendre_symbols,
    sqrt_mod,
)
from .errors import InvariantViolation, PreconditionError, SearchExhausted

DIRECT = "direct-search"
EASY = "easy-construction"
DESCENT = "descent"

DEFAULT_CEILING = 10**6


@dataclass(frozen=True)
class WitnessResult:
    a: int
    beta: int
    method: str

    def __post_init__(self) -> None:
        if self.beta % 4 != 3 or legendre_symbol(self.a, self.beta) != -1:
            raise InvariantViolation("not a Legendre-lemma witness", a=self.a, beta=self.beta)


def _require(a: int, modulus: int, residue: int) -> None:
    if not is_prime(a) or a % modulus != residue:
        raise PreconditionError(f"a={a} must be a prime = {residue} (mod {modulus})")


def find_witness(a: int, ceiling: int = DEFAULT_CEILING) -> WitnessResult:
    """The least prime beta = 3 (mod 4) of which a is a quadratic nonresidue."""
    _require(a, 4, 1)
    for beta in range(3, ceiling + 1, 4):
        if is_prime(beta) and legendre_symbol(a, beta, validate=False) == -1:
            return WitnessResult(a, beta, DIRECT)
    raise SearchExhausted(f"no witness for {a} below {ceiling}", ceiling)


def easy_witness(a: int) -> WitnessResult:
    """For a = 5 (mod 8): the least prime factor = 3 (mod 4) of (1 + a)/2.

    (1 + a)/2 is 3 mod 4, so such a factor beta exists, and a = -1 (mod beta)
    makes a a nonresidue.
    """
    _require(a, 8, 5)
    half = (1 + a) // 2
    beta = min(p for p in factorize(half) if p % 4 == 3)
    return WitnessResult(a, beta, EASY)


def witness_below_check(a: int) -> tuple[bool, WitnessResult]:
    """Confirm the least witness is smaller than a itself."""
    try:
        result = find_witness(a, ceiling=a - 1)
    except SearchExhausted:
        raise InvariantViolation("no witness below a", a=a) from None
    return True, result


# --- Teege's descent ----------------------------------------------------------


@dataclass(frozen=True)
class DescentStep:
    x: int
    B: int
    b_prime: int


@dataclass(frozen=True)
class DescentChain:
    p: int
    start: int
    steps: tuple[DescentStep, ...]
    terminal: int

    @property
    def primes(self) -> list[int]:
        return [s.B for s in self.steps] + [self.terminal]


def admissible_start(p: int, B: int) -> bool:
    """B prime, B = 3 (mod 4), and -p a nonzero square mod B."""
    return B % 4 == 3 and is_prime(B) and legendre_symbol(-p, B, validate=False) == 1


def teege_descent(p: int, B_start: int) -> DescentChain:
    """Walk x^2 + p = B b' down from B_start to a prime below p.

    At each step x is the even root of x^2 = -p (mod B) in [0, B), so b' < B
    and b' = 3 (mod 4); the next B is the largest prime factor of b' that is
    3 mod 4 (every such factor has -p as a residue).
    """
    _require(p, 8, 1)
    if not admissible_start(p, B_start):
        raise PreconditionError(f"B_start={B_start} is not an admissible prime for p={p}")
    steps = []
    B = B_start
    while B > p:
        x = sqrt_mod(-p, B)
        if x % 2:
            x = B - x
        b_prime, rem = divmod(x * x + p, B)
        if rem:
            raise InvariantViolation("modular root failed", p=p, B=B, x=x)
        cofactor = b_prime
        while cofactor % p == 0:
            cofactor //= p
        candidates = [q for q in factorize(cofactor) if q % 4 == 3 and q < B] if cofactor > 1 else []
        if not candidates:
            raise InvariantViolation("b' has no admissible prime factor below B", p=p, B=B, b_prime=b_prime)
        nxt = max(candidates)
        if legendre_symbol(-p, nxt, validate=False) != 1:
            raise InvariantViolation("-p is not a residue of the next prime", p=p, B=nxt)
        steps.append(DescentStep(x, B, b_prime))
        B = nxt
    if legendre_symbol(p, B, validate=False) != -1:
        raise InvariantViolation("terminal prime is not a witness", p=p, terminal=B)
    return DescentChain(p, B_start, tuple(steps), B)


def smallest_admissible_above(p: int, ceiling: int = DEFAULT_CEILING) -> int:
    for B in range(p + 1, ceiling + 1):
        if admissible_start(p, B):
            return B
    raise SearchExhausted(f"no admissible start above {p} below {ceiling}", ceiling)


# --- Rogers-Selberg sums -------------------------------------------------------


@dataclass
class RogersSums:
    D: int
    x: int
    s1_plus: float
    s1_minus: float
    s3_plus: float
    s3_minus: float
    excluded: float
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def quarter_ln_x(self) -> float:
        return math.log(self.x) / 4

    def deviations(self) -> dict[str, float]:
        q = self.quarter_ln_x
        return {
            "s1+": self.s1_plus - q,
            "s1-": self.s1_minus - q,
            "s3+": self.s3_plus - q,
            "s3-": self.s3_minus - q,
        }

    @property
    def total(self) -> float:
        return math.fsum([self.s1_plus, self.s1_minus, self.s3_plus, self.s3_minus, self.excluded])


def _check_D(D: int) -> None:
    if D == 0 or is_square(D):
        raise PreconditionError(f"D={D} must be a nonzero nonsquare")


def _log_terms(primes: np.ndarray) -> np.ndarray:
    pf = primes.astype(np.float64)
    return np.log(pf) / pf


def rogers_partition(D: int, x: int, segment_size: int = DEFAULT_SEGMENT) -> RogersSums:
    """The four sums of ln p / p over p <= x split by p mod 4 and the sign of (D/p).

    Primes dividing 2D are collected in ``excluded`` so the five parts add up to
    the Mertens sum. All accumulation uses fsum, so results do not depend on
    the segmentation.
    """
    _check_D(D)
    if x < 2:
        raise PreconditionError("x must be at least 2")
    parts: dict[str, list[float]] = {k: [] for k in ("1+", "1-", "3+", "3-", "ex")}
    for seg in iter_prime_segments(2, x, segment_size):
        terms = _log_terms(seg)
        divides = (2 * D) % seg == 0
        parts["ex"].extend(terms[divides].tolist())
        keep = ~divides
        primes, terms = seg[keep], terms[keep]
        chi = legendre_symbols(D, primes)
        for r in (1, 3):
            cls = primes % 4 == r
            parts[f"{r}+"].extend(terms[cls & (chi == 1)].tolist())
            parts[f"{r}-"].extend(terms[cls & (chi == -1)].tolist())
    return RogersSums(
        D,
        x,
        math.fsum(parts["1+"]),
        math.fsum(parts["1-"]),
        math.fsum(parts["3+"]),
        math.fsum(parts["3-"]),
        math.fsum(parts["ex"]),
        {k: len(v) for k, v in parts.items()},
    )


def selberg_sum(D: int, x: int) -> float:
    """Sum of ln p / p over odd primes p <= x, p not dividing D, with (D/p) = +1."""
    _check_D(D)
    if x < 2:
        raise PreconditionError("x must be at least 2")
    terms: list[float] = []
    for seg in iter_prime_segments(3, x):
        seg = seg[D % seg != 0]
        terms.extend(_log_terms(seg[legendre_symbols(D, seg) == 1]).tolist())
    return math.fsum(terms)


def mertens_sum(x: int) -> float:
    """Sum of ln p / p over all primes p <= x."""
    if x < 2:
        raise PreconditionError("x must be at least 2")
    terms: list[float] = []
    for seg in iter_prime_segments(2, x):
        terms.extend(_log_terms(seg).tolist())
    return math.fsum(terms)
