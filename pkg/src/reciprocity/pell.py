"""Fundamental Pell solutions and the factor-splitting argument built on them.

If T^2 - D U^2 = 1 is the minimal solution and D = 1 (mod 4), then T is odd,
U is even, and the coprime halves (T+1)/2, (T-1)/2 multiply to D (U/2)^2. Each
half is therefore a divisor of D times a square, which turns one Pell solution
into a solution of k M^2 - (D/k) N^2 = 1 for a proper divisor k of D.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .arithmetic import is_prime, is_square
from .errors import InvariantViolation, PreconditionError, SearchExhausted


@dataclass(frozen=True)
class PellSolution:
    D: int
    T: int
    U: int

    def __post_init__(self) -> None:
        if self.T * self.T - self.D * self.U * self.U != 1:
            raise InvariantViolation("not a Pell solution", D=self.D, T=self.T, U=self.U)

    @property
    def unit(self) -> float:
        """T + U*sqrt(D) as a float (the regulator is its logarithm)."""
        return self.T + self.U * self.D**0.5


@dataclass(frozen=True)
class PellCaseResult:
    """Witness (M, N) for ``first*M^2 - second*N^2 = sign``."""

    case_id: str
    first: int
    second: int
    sign: int
    M: int
    N: int

    def holds(self) -> bool:
        return self.first * self.M**2 - self.second * self.N**2 == self.sign


def continued_fraction_sqrt(D: int) -> tuple[int, list[int]]:
    """(a0, period) of the continued fraction of sqrt(D), D a positive nonsquare."""
    a0 = isqrt(D)
    if a0 * a0 == D:
        raise PreconditionError(f"{D} is a perfect square")
    m, d, a = 0, 1, a0
    period = []
    while a != 2 * a0:
        m = d * a - m
        d = (D - m * m) // d
        a = (a0 + m) // d
        period.append(a)
    return a0, period


def fundamental_pell(D: int) -> PellSolution:
    """Minimal positive (T, U) with T^2 - D U^2 = 1.

    The answer is the convergent ending the first (even-length) pass through
    the period of sqrt(D)'s continued fraction, exact in Python integers.

    >>> fundamental_pell(5)
    PellSolution(D=5, T=9, U=4)
    """
    if D < 2:
        raise PreconditionError(f"Pell equation needs D >= 2, got {D}")
    a0, period = continued_fraction_sqrt(D)
    terms = period if len(period) % 2 == 0 else period + period
    # convergents p/q of [a0; terms[:-1]]
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    for a in terms[:-1]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return PellSolution(D, p, q)


def _squarefree_split(T: int, D: int) -> tuple[int, int, int]:
    """Split (T+1)/2 = k M^2, (T-1)/2 = (D/k) N^2 for squarefree D. Returns (k, M, N)."""
    if T % 2 == 0:
        raise InvariantViolation("T must be odd when D = 1 (mod 4)", D=D, T=T)
    upper, lower = (T + 1) // 2, (T - 1) // 2
    if gcd(upper, lower) != 1:
        raise InvariantViolation("(T+1)/2 and (T-1)/2 share a factor", T=T)
    k = gcd(upper, D)
    l = D // k
    if upper % k or lower % l:
        raise InvariantViolation("halves do not absorb D", D=D, T=T, k=k)
    M2, N2 = upper // k, lower // l
    if not (is_square(M2) and is_square(N2)):
        raise InvariantViolation("cofactors are not squares", D=D, T=T, k=k)
    return k, isqrt(M2), isqrt(N2)


def _require_prime(n: int, residue: int, name: str) -> None:
    if not is_prime(n) or n % 4 != residue:
        raise PreconditionError(f"{name}={n} must be a prime = {residue} (mod 4)")


def classify_two_prime_case(b: int, B: int) -> PellCaseResult:
    """Which of bM^2 - BN^2 = 1 or BM^2 - bN^2 = 1 the minimal solution for D = bB yields.

    The two other factor patterns (M^2 - bB N^2 = 1 and bB M^2 - N^2 = 1) are
    impossible; meeting one raises :class:`InvariantViolation`.
    """
    _require_prime(b, 3, "b")
    _require_prime(B, 3, "B")
    if b == B:
        raise PreconditionError("b and B must be distinct")
    D = b * B
    sol = fundamental_pell(D)
    if sol.U % 2:
        raise InvariantViolation("U must be even when D = 1 (mod 4)", D=D, T=sol.T, U=sol.U)
    k, M, N = _squarefree_split(sol.T, D)
    if k == 1:
        raise InvariantViolation("case 1 would contradict minimality", b=b, B=B, M=M, N=N)
    if k == D:
        raise InvariantViolation("case 2 would make -1 a residue of b", b=b, B=B, M=M, N=N)
    if k == b:
        result = PellCaseResult("bM^2-BN^2=+1", b, B, 1, M, N)
    else:
        result = PellCaseResult("BM^2-bN^2=+1", B, b, 1, M, N)
    if not result.holds():
        raise InvariantViolation("split witness fails", result=result)
    return result


def six_equations(a: int, b: int, beta: int) -> list[tuple[str, int, int, int]]:
    """The six equations in their listed order, +1 before -1: (case_id, first, second, sign)."""
    out = []
    for first, second, name in (
        (a, b * beta, "a"),
        (b, a * beta, "b"),
        (beta, a * b, "beta"),
    ):
        others = {"a": "b*beta", "b": "a*beta", "beta": "a*b"}[name]
        for sign in (1, -1):
            out.append((f"{name}M^2-{others}N^2={sign:+d}", first, second, sign))
    return out


def _validate_triple(a: int, b: int, beta: int) -> None:
    _require_prime(a, 1, "a")
    _require_prime(b, 3, "b")
    _require_prime(beta, 3, "beta")
    if b == beta:
        raise PreconditionError("b and beta must be distinct")


def search_six_equations(a: int, b: int, beta: int, bound: int = 10_000) -> PellCaseResult:
    """Bounded direct search: first equation (listed order) with a witness M <= bound."""
    _validate_triple(a, b, beta)
    for case_id, first, second, sign in six_equations(a, b, beta):
        for M in range(1, bound + 1):
            rest = first * M * M - sign
            if rest % second == 0 and is_square(rest // second) and rest > 0:
                return PellCaseResult(case_id, first, second, sign, M, isqrt(rest // second))
    raise SearchExhausted(f"no witness with M <= {bound} for ({a}, {b}, {beta})", bound)


def solve_six_equations(a: int, b: int, beta: int) -> PellCaseResult:
    """Solve one of a M^2 - b beta N^2, b M^2 - a beta N^2, beta M^2 - ab N^2 = +-1.

    D = a*b*beta is 1 mod 4, so the minimal solution of x^2 - D y^2 = 1 splits
    as k M^2 - (D/k) N^2 = 1 with k a proper divisor of D; the pair (k, D/k)
    names one of the six equations (k in {a, b, beta} gives sign +1, its
    complement gives sign -1 with M and N exchanged).
    """
    _validate_triple(a, b, beta)
    D = a * b * beta
    sol = fundamental_pell(D)
    if D % 4 != 1:
        return search_six_equations(a, b, beta)
    k, M, N = _squarefree_split(sol.T, D)
    if k in (1, D):
        raise InvariantViolation("trivial split contradicts minimality or -1 residue", k=k, D=D)
    for case_id, first, second, sign in six_equations(a, b, beta):
        if sign == 1 and first == k:
            result = PellCaseResult(case_id, first, second, sign, M, N)
            break
        if sign == -1 and second == k:
            result = PellCaseResult(case_id, first, second, sign, N, M)
            break
    else:  # pragma: no cover - k ranges over exactly the six cofactors
        raise InvariantViolation("split cofactor names no equation", k=k, D=D)
    if not result.holds():
        raise InvariantViolation("split witness fails", result=result)
    return result
