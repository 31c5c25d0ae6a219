"""Binary quadratic forms ax^2 + bxy + cy^2: reduction, class sets, representations.

Everything is keyed by the discriminant d = b^2 - 4ac. Where a determinant is
wanted (forms written ax^2 + 2bxy + cy^2), it is D = d/4 and only exists for
4 | d; use :func:`from_determinant` to go the other way.

Classes are proper classes (substitutions of determinant +1). Definite classes
are counted by Gauss-reduced forms; indefinite classes by cycles of the rho
operator on reduced forms.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import gcd, isqrt

import numpy as np

from .arithmetic import factorize, is_square, legendre_symbol
from .errors import InvariantViolation, PreconditionError
from .pell import PellSolution, fundamental_pell


@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def content(self) -> int:
        return gcd(gcd(self.a, self.b), self.c)

    def is_primitive(self) -> bool:
        return self.content == 1

    @classmethod
    def parse(cls, text: str) -> "QuadForm":
        a, b, c = (int(t) for t in text.strip("() ").split(","))
        return cls(a, b, c)


@dataclass(frozen=True)
class Discriminant:
    d: int

    def __post_init__(self) -> None:
        if self.d % 4 not in (0, 1):
            raise PreconditionError(f"discriminant {self.d} is not 0 or 1 mod 4")
        if is_square(self.d):
            raise PreconditionError(f"discriminant {self.d} is a perfect square")

    @property
    def determinant(self) -> int | None:
        return self.d // 4 if self.d % 4 == 0 else None

    @property
    def definite(self) -> bool:
        return self.d < 0


def from_determinant(D: int) -> Discriminant:
    """The discriminant 4D of forms ax^2 + 2bxy + cy^2 of determinant D."""
    return Discriminant(4 * D)


def discriminant(Q: QuadForm) -> Discriminant:
    return Discriminant(Q.disc)


def unit_count(d: Discriminant | int) -> int:
    """Number of proper automorphs modulo the infinite part: 6, 4, 2 or 1."""
    dv = d.d if isinstance(d, Discriminant) else d
    if dv == -3:
        return 6
    if dv == -4:
        return 4
    return 2 if dv < 0 else 1


def identity_constant(d: Discriminant | int) -> int:
    """The constant written in front of the fundamental identity: 2 if d < 0, else 1."""
    dv = d.d if isinstance(d, Discriminant) else d
    return 2 if dv < 0 else 1


# --- definite reduction -------------------------------------------------------


def _normalize_definite(a: int, b: int, c: int) -> tuple[int, int, int]:
    # translate b into (-a, a]
    r = (a - b) // (2 * a)
    return a, b + 2 * r * a, a * r * r + b * r + c


def _reduce_definite(Q: QuadForm) -> QuadForm:
    a, b, c = _normalize_definite(Q.a, Q.b, Q.c)
    while a > c or (a == c and b < 0):
        a, b, c = _normalize_definite(c, -b, a)
    return QuadForm(a, b, c)


def is_reduced_definite(Q: QuadForm) -> bool:
    a, b, c = Q.a, Q.b, Q.c
    if not (abs(b) <= a <= c):
        return False
    if (abs(b) == a or a == c) and b < 0:
        return False
    return True


# --- indefinite reduction -----------------------------------------------------


def is_reduced_indefinite(Q: QuadForm) -> bool:
    """0 < b < sqrt(d) and sqrt(d) - b < 2|a| < sqrt(d) + b."""
    d = Q.disc
    b, twoa = Q.b, 2 * abs(Q.a)
    if b <= 0 or b * b >= d:
        return False
    if (twoa + b) ** 2 <= d:
        return False
    return twoa - b <= 0 or (twoa - b) ** 2 < d


def rho(Q: QuadForm) -> QuadForm:
    """(a, b, c) -> (c, b', (b'^2 - d)/4c), b' = -b mod 2|c| just below sqrt(d)."""
    d = Q.disc
    c = Q.c
    r = isqrt(d)
    m = 2 * abs(c)
    b2 = r - (r + Q.b) % m
    return QuadForm(c, b2, (b2 * b2 - d) // (4 * c))


def reduction_cycle(Q: QuadForm) -> list[QuadForm]:
    """The rho-cycle of reduced forms reached from Q, starting at the first one met."""
    f = Q
    for _ in range(10_000 + 4 * abs(Q.a) + 4 * abs(Q.c)):
        if is_reduced_indefinite(f):
            break
        f = rho(f)
    else:
        raise InvariantViolation("rho iteration failed to reach a reduced form", form=str(Q))
    cycle = [f]
    g = rho(f)
    while g != f:
        cycle.append(g)
        g = rho(g)
    return cycle


def _canonical_from_cycle(cycle: list[QuadForm]) -> QuadForm:
    """Smallest positive leading coefficient on the cycle, middle term in (-a, a]."""
    candidates = []
    for f in cycle:
        if f.a > 0:
            a, b, c = _normalize_definite(f.a, f.b, f.c)
            candidates.append((a, abs(b), b < 0, QuadForm(a, b, c)))
    if not candidates:
        raise InvariantViolation("cycle without a positive leading coefficient")
    return min(candidates)[3]


def _check_form(Q: QuadForm) -> None:
    if is_square(Q.disc):
        raise PreconditionError(f"{Q} has square discriminant {Q.disc}")
    if not Q.is_primitive():
        raise PreconditionError(f"{Q} is not primitive")


def reduce(Q: QuadForm) -> QuadForm:
    """Canonical representative of Q's proper class.

    Definite: the Gauss-reduced form |b| <= a <= c, with b >= 0 when |b| = a or
    a = c. Indefinite: among forms on Q's reduction cycle with a > 0, the one
    with least a, translated so that -a < b <= a (least |b|, then b >= 0).
    """
    _check_form(Q)
    if Q.disc < 0:
        if Q.a < 0:
            raise PreconditionError(f"{Q} is negative definite")
        return _reduce_definite(Q)
    return _canonical_from_cycle(reduction_cycle(Q))


@dataclass(frozen=True)
class ClassSet:
    d: Discriminant
    representatives: tuple[QuadForm, ...]
    cycles: tuple[tuple[QuadForm, ...], ...] = field(default=(), repr=False)

    @property
    def h(self) -> int:
        return len(self.representatives)


def reduced_definite_forms(d: int) -> list[QuadForm]:
    """All primitive reduced positive definite forms of discriminant d < 0."""
    out = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            Q = QuadForm(a, b, c)
            if c >= a and is_reduced_definite(Q) and Q.is_primitive():
                out.append(Q)
        a += 1
    return out


def reduced_indefinite_forms(d: int) -> list[QuadForm]:
    """All primitive reduced indefinite forms of discriminant d > 0."""
    out = []
    r = isqrt(d)
    for b in range(1, r + 1):
        if (b - d) % 2:
            continue
        ac = (b * b - d) // 4
        for a in range(1, -ac + 1):
            if ac % a:
                continue
            for sa in (a, -a):
                Q = QuadForm(sa, b, ac // sa)
                if is_reduced_indefinite(Q) and Q.is_primitive():
                    out.append(Q)
    return out


def class_number(d: Discriminant | int) -> ClassSet:
    """One canonical representative per proper class of primitive forms.

    >>> class_number(-20).representatives
    (QuadForm(a=1, b=0, c=5), QuadForm(a=2, b=2, c=3))
    """
    disc = d if isinstance(d, Discriminant) else Discriminant(d)
    if disc.d < 0:
        return ClassSet(disc, tuple(reduced_definite_forms(disc.d)))
    remaining = set(reduced_indefinite_forms(disc.d))
    cycles = []
    while remaining:
        start = min(remaining)
        cycle = reduction_cycle(start)
        if cycle[0] != start or not remaining.issuperset(cycle):
            raise InvariantViolation("reduced form outside a closed cycle", form=str(start))
        remaining.difference_update(cycle)
        cycles.append(tuple(cycle))
    reps = [_canonical_from_cycle(list(c)) for c in cycles]
    order = sorted(range(len(reps)), key=lambda i: reps[i])
    return ClassSet(
        disc,
        tuple(reps[i] for i in order),
        tuple(cycles[i] for i in order),
    )


# --- representations ----------------------------------------------------------


def _definite_rows(Q: QuadForm, limit: int):
    """Per y, the integer x-interval with Q(x, y) <= limit (positive definite Q)."""
    a, b = Q.a, Q.b
    nd = -Q.disc
    # 4a*Q = (2ax + by)^2 + |d| y^2
    ymax = isqrt(4 * a * limit // nd)
    for y in range(-ymax, ymax + 1):
        rem = 4 * a * limit - nd * y * y
        if rem < 0:
            continue
        s = isqrt(rem)
        # |2ax + by| <= s
        lo = -((s + b * y) // (2 * a))
        hi = (s - b * y) // (2 * a)
        if lo <= hi:
            yield y, lo, hi


def _indefinite_rows(Q: QuadForm, limit: int, pell: PellSolution):
    """Per y >= 0, the x-interval with 0 < Q(x, y) <= limit inside the automorph domain.

    The domain is y >= 0 and U(2ax + by) > 2Ty, i.e. 1 <= xi/eta < eps^2 for
    xi, eta = 2ax + (b +- sqrt(d)) y and eps = T + U sqrt(D): one point per orbit
    of the automorph group on positive values. Requires a > 0.
    """
    a, b = Q.a, Q.b
    if a <= 0:
        raise PreconditionError("automorph domain enumeration needs a > 0")
    d = Q.disc
    T, U = pell.T, pell.U
    # 2ax + by > 2Ty/U together with 4aQ = (2ax + by)^2 - d y^2 <= 4a*limit
    # forces 4y^2/U^2 < 4a*limit
    y = 0
    while y * y <= a * limit * U * U:
        x_lo = (2 * T * y - U * b * y) // (2 * a * U) + 1
        s = isqrt(4 * a * limit + d * y * y)
        x_hi = (s - b * y) // (2 * a)
        if x_lo <= x_hi:
            yield y, x_lo, x_hi
        y += 1


def lattice_points(
    Q: QuadForm,
    limit: int,
    pell: PellSolution | None = None,
    bound: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Arrays (x, y, value) of lattice points with 0 < Q(x, y) <= limit.

    Definite forms: the full ellipse. Indefinite forms: either the automorph
    fundamental domain (``pell`` given) or the box |x|, |y| <= bound.
    """
    xs, ys = [], []
    if Q.disc < 0:
        if Q.a <= 0:
            raise PreconditionError("definite enumeration needs a positive definite form")
        rows = _definite_rows(Q, limit)
    elif pell is not None:
        D4 = Q.disc
        if D4 % 4 or pell.D != D4 // 4:
            raise PreconditionError("Pell data does not match the form's determinant")
        rows = _indefinite_rows(Q, limit, pell)
    elif bound is not None:
        rows = ((y, -bound, bound) for y in range(-bound, bound + 1))
    else:
        raise PreconditionError("indefinite forms need an automorph domain or a coordinate bound")
    for y, lo, hi in rows:
        x = np.arange(lo, hi + 1, dtype=np.int64)
        xs.append(x)
        ys.append(np.full(x.size, y, dtype=np.int64))
    if not xs:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    v = Q.a * x * x + Q.b * x * y + Q.c * y * y
    keep = (v > 0) & (v <= limit)
    return x[keep], y[keep], v[keep]


def automorph_domain(Q: QuadForm) -> PellSolution:
    """Pell data (T, U) for D = d/4 that defines Q's fundamental domain."""
    if Q.disc <= 0 or Q.disc % 4:
        raise PreconditionError("automorph domain defined here for d > 0, 4 | d")
    return fundamental_pell(Q.disc // 4)


def proper_representations(
    Q: QuadForm,
    m: int,
    domain: str | None = None,
    bound: int | None = None,
) -> list[tuple[int, int]]:
    """All (x, y) with gcd(x, y) = 1 and Q(x, y) = m.

    Definite forms: complete. Indefinite forms: complete inside the automorph
    fundamental domain (``domain="automorph"``) or inside |x|, |y| <= bound.
    """
    if Q.disc < 0:
        if m <= 0:
            raise PreconditionError("definite forms represent only positive m here")
        x, y, v = lattice_points(Q, m)
    else:
        if domain == "automorph":
            x, y, v = lattice_points(Q, m, pell=automorph_domain(Q))
        elif bound is not None:
            x, y, v = _box_points(Q, bound)
        else:
            raise PreconditionError("indefinite forms need domain='automorph' or a bound")
    sel = (v == m) & (np.gcd(x, y) == 1)
    return sorted(zip(x[sel].tolist(), y[sel].tolist()))


def _box_points(Q: QuadForm, bound: int):
    r = np.arange(-bound, bound + 1, dtype=np.int64)
    x, y = np.meshgrid(r, r, indexing="ij")
    x, y = x.ravel(), y.ravel()
    return x, y, Q.a * x * x + Q.b * x * y + Q.c * y * y


def representable_numbers(Q: QuadForm, limit: int) -> list[int]:
    """Values 0 <= n <= limit taken by a positive definite Q, proper or not (0 included)."""
    _, _, v = lattice_points(Q, limit)
    return [0] + sorted(set(v.tolist()))


@dataclass(frozen=True)
class RepresentationCount:
    m: int
    count: int
    mu: int
    w: int
    predicted: int


def representation_counts(classes: ClassSet, limit: int) -> Counter:
    """Total proper representations of each m <= limit over all classes.

    Indefinite classes count inside the automorph domain, so each orbit once.
    """
    totals: Counter = Counter()
    pell = automorph_domain(classes.representatives[0]) if classes.d.d > 0 else None
    for Q in classes.representatives:
        x, y, v = lattice_points(Q, limit, pell=pell)
        v = v[np.gcd(x, y) == 1]
        vals, counts = np.unique(v, return_counts=True)
        totals.update(dict(zip(vals.tolist(), counts.tolist())))
    return totals


def lemma_prediction(d: Discriminant, n: int) -> tuple[int, int]:
    """(mu, w*2^mu) if every prime of n splits for d, else (mu, 0)."""
    mu = 0
    split = True
    for p in factorize(n) if n > 1 else {}:
        mu += 1
        if legendre_symbol(d.d, p) != 1:
            split = False
    return mu, (unit_count(d) * 2**mu if split else 0)


def counting_lemma_check(d: Discriminant | int, n: int) -> RepresentationCount:
    """Count proper representations of n over all classes and compare with w*2^mu.

    Raises :class:`InvariantViolation` if the count is neither w*2^mu (all prime
    factors split) nor 0 (some factor does not).
    """
    disc = d if isinstance(d, Discriminant) else Discriminant(d)
    if n < 1 or gcd(n, 2 * disc.d) != 1:
        raise PreconditionError(f"n={n} must be positive and prime to 2D")
    classes = class_number(disc)
    count = representation_counts(classes, n)[n]
    mu, predicted = lemma_prediction(disc, n)
    result = RepresentationCount(n, count, mu, unit_count(disc), predicted)
    if count != predicted:
        raise InvariantViolation("representation count breaks the w*2^mu dichotomy", result=result)
    return result
