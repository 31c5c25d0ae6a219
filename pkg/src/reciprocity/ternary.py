"""Legendre's ternary equation ax^2 + by^2 + cz^2 = 0 and the eight reciprocity cases."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import gcd, isqrt

import numpy as np

from .arithmetic import is_squarefree, legendre_symbol, primes_in_range, prime_factors
from .errors import PreconditionError


@dataclass(frozen=True)
class TernaryForm:
    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        coeffs = (self.a, self.b, self.c)
        if any(not is_squarefree(k) for k in coeffs):
            raise PreconditionError(f"{coeffs}: coefficients must be nonzero and squarefree")
        if gcd(self.a, self.b) != 1 or gcd(self.b, self.c) != 1 or gcd(self.a, self.c) != 1:
            raise PreconditionError(f"{coeffs}: coefficients must be pairwise coprime")

    def __call__(self, x: int, y: int, z: int) -> int:
        return self.a * x * x + self.b * y * y + self.c * z * z


@dataclass(frozen=True)
class SolvabilityReport:
    residue_conditions: tuple[bool, bool, bool]
    sign_condition: bool
    witness: tuple[int, int, int] | None = None

    @property
    def solvable(self) -> bool:
        return all(self.residue_conditions) and self.sign_condition


def is_residue_mod(n: int, m: int) -> bool:
    """Whether n is a square mod |m| for squarefree m coprime to n (vacuous for |m| = 1)."""
    for p in prime_factors(m) if abs(m) > 1 else []:
        if p != 2 and legendre_symbol(n, p, validate=False) != 1:
            return False
    return True


def ternary_conditions(F: TernaryForm) -> SolvabilityReport:
    a, b, c = F.a, F.b, F.c
    residues = (is_residue_mod(-b * c, a), is_residue_mod(-c * a, b), is_residue_mod(-a * b, c))
    signs = {k > 0 for k in (a, b, c)}
    return SolvabilityReport(residues, len(signs) == 2)


def ternary_solve(F: TernaryForm) -> tuple[int, int, int] | None:
    """A primitive nontrivial solution within |x| <= sqrt|bc|, |y| <= sqrt|ac|, |z| <= sqrt|ab|.

    By Holzer's theorem a solvable equation has a solution inside this box, so
    ``None`` certifies unsolvability.
    """
    a, b, c = F.a, F.b, F.c
    X, Y, Z = isqrt(abs(b * c)), isqrt(abs(a * c)), isqrt(abs(a * b))
    x = np.arange(X + 1, dtype=np.int64)[:, None]
    y = np.arange(Y + 1, dtype=np.int64)[None, :]
    rest = -(a * x * x + b * y * y)
    ok = rest % c == 0
    z2 = np.where(ok, rest // c, -1)
    z = np.floor(np.sqrt(np.clip(z2, 0, None).astype(np.float64))).astype(np.int64)
    # float sqrt may be off by one near perfect squares
    z = np.where((z + 1) * (z + 1) <= z2, z + 1, z)
    z = np.where(z * z > z2, z - 1, z)
    hit = ok & (z2 >= 0) & (z * z == z2) & (z <= Z)
    hit[0, 0] = False
    if not hit.any():
        return None
    i, j = np.argwhere(hit)[0]
    sol = (int(i), int(j), int(z[i, j]))
    g = gcd(gcd(sol[0], sol[1]), sol[2])
    return (sol[0] // g, sol[1] // g, sol[2] // g)


def mod4_obstruction(F: TernaryForm) -> bool:
    """True iff a = b = c = 1 (mod 4), in which case no nontrivial solution exists."""
    return F.a % 4 == F.b % 4 == F.c % 4 == 1


def solvability(F: TernaryForm) -> SolvabilityReport:
    report = ternary_conditions(F)
    return SolvabilityReport(report.residue_conditions, report.sign_condition, ternary_solve(F))


# --- eight-case sweep ---------------------------------------------------------

# (premise symbol value, required conclusion) for each class pattern of (p, q),
# where the premise is (p/q) and the conclusion is about (q/p).
CASES = {
    (1, 3, -1): ("I", -1),
    (1, 3, 1): ("VII", 1),
    (3, 1, 1): ("II", 1),
    (3, 1, -1): ("VIII", -1),
    (3, 3, 1): ("III", -1),
    (3, 3, -1): ("IV", 1),
    (1, 1, 1): ("V", 1),
    (1, 1, -1): ("VI", -1),
}
CASE_ORDER = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII")


@dataclass
class CaseReport:
    limit: int
    counts: Counter = field(default_factory=Counter)
    violations: list[tuple[str, int, int, int, int]] = field(default_factory=list)

    def rows(self) -> list[tuple[str, int]]:
        return [(case, self.counts[case]) for case in CASE_ORDER]


def classify_pair(p: int, q: int) -> tuple[str, int, int, bool]:
    """(case, (p/q), (q/p), implication holds) for distinct odd primes p, q."""
    pq = legendre_symbol(p, q, validate=False)
    qp = legendre_symbol(q, p, validate=False)
    case, required = CASES[(p % 4, q % 4, pq)]
    return case, pq, qp, qp == required


def verify_reciprocity_cases(limit: int) -> CaseReport:
    """Check the implication matching every ordered pair of distinct odd primes below limit."""
    if limit < 7:
        raise PreconditionError("limit must be at least 7")
    primes = primes_in_range(3, limit - 1)
    report = CaseReport(limit)
    for p in primes:
        for q in primes:
            if p == q:
                continue
            case, pq, qp, ok = classify_pair(p, q)
            report.counts[case] += 1
            if not ok:
                report.violations.append((case, p, q, pq, qp))
    return report


def valid_forms(bound: int) -> list[TernaryForm]:
    """Every TernaryForm with coefficients in [-bound, bound]."""
    coeffs = [k for k in range(-bound, bound + 1) if k and is_squarefree(k)]
    out = []
    for a in coeffs:
        for b in coeffs:
            if gcd(a, b) != 1:
                continue
            for c in coeffs:
                if gcd(a, c) == 1 and gcd(b, c) == 1:
                    out.append(TernaryForm(a, b, c))
    return out

