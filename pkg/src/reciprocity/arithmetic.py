"""Exact integer primitives: primality, sieving, quadratic symbols, modular roots.

The prime-modulus symbol is computed with Euler's criterion only. Reciprocity is
the thing being checked elsewhere in the package, so nothing here may rely on it;
the Jacobi symbol is assembled from Legendre symbols over a factorization.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Iterator

import numpy as np

from .errors import PreconditionError

# Miller-Rabin with the first 13 primes as bases is exact below this bound
# (Sorenson & Webster 2015).
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981

# int64 products of residues must not overflow in the vectorized kernels
_VECTOR_MODULUS_LIMIT = 3_000_000_000

DEFAULT_SEGMENT = 1 << 20


def is_prime(n: int) -> bool:
    """Deterministic primality for 0 <= n < 3.3e24.

    >>> [k for k in range(20) if is_prime(k)]
    [2, 3, 5, 7, 11, 13, 17, 19]
    """
    if n < 2:
        return False
    for p in MR_BASES:
        if n % p == 0:
            return n == p
    if n < 43 * 43:
        return True
    if n >= MR_DETERMINISTIC_BOUND:
        raise PreconditionError(f"{n} exceeds the deterministic primality range")
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| by trial division (desk-scale inputs only)."""
    n = abs(n)
    if n == 0:
        raise PreconditionError("0 has no prime factorization")
    factors: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    f, step = 5, 2
    while f * f <= n:
        while n % f == 0:
            factors[f] = factors.get(f, 0) + 1
            n //= f
        f += step
        step = 6 - step
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def prime_factors(n: int) -> list[int]:
    return sorted(factorize(n))


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorize(n).values())


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def legendre_symbol(a: int, p: int, validate: bool = True) -> int:
    """(a/p) for an odd prime p via Euler's criterion a^((p-1)/2) mod p."""
    if validate and (p < 3 or p % 2 == 0 or not is_prime(p)):
        raise PreconditionError(f"legendre_symbol needs an odd prime modulus, got {p}")
    r = pow(a % p, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


def jacobi_symbol(D: int, n: int) -> int:
    """(D/n) for odd n >= 1, as the product of Legendre symbols over n's factorization."""
    if n < 1 or n % 2 == 0:
        raise PreconditionError(f"jacobi_symbol needs an odd positive modulus, got {n}")
    value = 1
    if n == 1:
        return value
    for p, e in factorize(n).items():
        s = legendre_symbol(D, p, validate=False)
        if s == 0:
            return 0
        if e % 2:
            value *= s
    return value


def sqrt_mod(a: int, p: int) -> int:
    """A root x in [0, p) of x^2 = a (mod p), p an odd prime (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if legendre_symbol(a, p) != 1:
        raise PreconditionError(f"{a} is not a square modulo {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre_symbol(z, p, validate=False) != -1:
        z += 1
    m, c, t, x = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, x = t * c % p, x * b % p
    return x


@dataclass(frozen=True)
class ResidueClassFilter:
    """Keep integers whose residue mod ``modulus`` lies in ``allowed``."""

    modulus: int
    allowed: frozenset[int]

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise PreconditionError("modulus must be positive")
        object.__setattr__(self, "allowed", frozenset(self.allowed))
        if any(not 0 <= r < self.modulus for r in self.allowed):
            raise PreconditionError(f"residues must lie in [0, {self.modulus})")

    @classmethod
    def of(cls, modulus: int, *residues: int) -> "ResidueClassFilter":
        """Build from residues given in any representation, e.g. ``of(5, 1, -1)``."""
        return cls(modulus, frozenset(r % modulus for r in residues))

    def admits(self, n: int) -> bool:
        return n % self.modulus in self.allowed

    def mask(self, values: np.ndarray) -> np.ndarray:
        return np.isin(values % self.modulus, sorted(self.allowed))


PRIMES_1_MOD_4 = ResidueClassFilter(4, frozenset({1}))
PRIMES_3_MOD_4 = ResidueClassFilter(4, frozenset({3}))


def _small_sieve(limit: int) -> np.ndarray:
    """All primes <= limit (plain Eratosthenes, used for base primes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for q in range(2, isqrt(limit) + 1):
        if flags[q]:
            flags[q * q :: q] = False
    return np.flatnonzero(flags).astype(np.int64)


def iter_prime_segments(
    lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT
) -> Iterator[np.ndarray]:
    """Yield ascending int64 arrays of the primes in [lo, hi], one per segment.

    Memory is O(segment_size + sqrt(hi)) regardless of the range length.
    """
    lo = max(lo, 2)
    if hi < lo:
        return
    if segment_size < 1:
        raise PreconditionError("segment_size must be positive")
    base = _small_sieve(isqrt(hi))
    start = lo
    while start <= hi:
        stop = min(start + segment_size - 1, hi)
        flags = np.ones(stop - start + 1, dtype=bool)
        for q in base:
            q = int(q)
            if q * q > stop:
                break
            first = max(q * q, -(-start // q) * q)
            flags[first - start :: q] = False
        yield np.flatnonzero(flags).astype(np.int64) + start
        start = stop + 1


def prime_array(
    lo: int,
    hi: int,
    filter: ResidueClassFilter | None = None,
    segment_size: int = DEFAULT_SEGMENT,
) -> np.ndarray:
    chunks = []
    for seg in iter_prime_segments(lo, hi, segment_size):
        chunks.append(seg[filter.mask(seg)] if filter is not None else seg)
    if not chunks:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(chunks)


def primes_in_range(
    lo: int, hi: int, filter: ResidueClassFilter | None = None
) -> list[int]:
    """Primes p with lo <= p <= hi (and p mod m in the filter's set), ascending."""
    return [int(p) for p in prime_array(lo, hi, filter)]


def legendre_symbols(a: int, primes: np.ndarray) -> np.ndarray:
    """Vectorized Euler criterion: (a/p) for each odd prime in ``primes``."""
    p = np.asarray(primes, dtype=np.int64)
    if p.size == 0:
        return np.zeros(0, dtype=np.int64)
    if int(p.max()) >= _VECTOR_MODULUS_LIMIT:
        raise PreconditionError("vectorized symbols limited to moduli below 3e9")
    if int(p.min()) < 3:
        raise PreconditionError("vectorized symbols need odd prime moduli")
    base = np.mod(a, p)
    exp = (p - 1) // 2
    result = np.ones_like(p)
    while True:
        odd = (exp & 1).astype(bool)
        result = np.where(odd, result * base % p, result)
        exp = exp >> 1
        if not exp.any():
            break
        base = base * base % p
    out = np.where(result == 1, 1, -1)
    out[result == 0] = 0
    return out

