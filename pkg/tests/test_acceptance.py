"""Acceptance suite: one test per criterion, one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (the summary lines print at the
end of the session) or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time
from fractions import Fraction
from math import isqrt
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import class_number_closure, pell_chakravala, pell_linear_scan, square_table  # noqa: E402
from reciprocity.arithmetic import (  # noqa: E402
    PRIMES_1_MOD_4,
    PRIMES_3_MOD_4,
    ResidueClassFilter,
    legendre_symbol,
    primes_in_range,
)
from reciprocity.pell import classify_two_prime_case, fundamental_pell  # noqa: E402
from reciprocity.quadform import QuadForm, class_number, counting_lemma_check  # noqa: E402
from reciprocity.series import (  # noqa: E402
    DEFAULT_EPS_SCHEDULE,
    SeriesParams,
    class_number_formula_check,
    divergence_witness,
    fundamental_identity_check,
    l_series_crosscheck,
    l_series_target,
    minorant_terms,
    product_ratio,
    teege_identity_check,
)
from reciprocity.ternary import mod4_obstruction, solvability, valid_forms, verify_reciprocity_cases  # noqa: E402
from reciprocity.witness import (  # noqa: E402
    admissible_start,
    easy_witness,
    mertens_sum,
    rogers_partition,
    teege_descent,
    witness_below_check,
)

RESULTS: dict[int, tuple[bool, str]] = {}


def _timed(budget: float):
    start = time.perf_counter()
    return lambda: (time.perf_counter() - start, budget)


def _within(clock) -> str:
    elapsed, budget = clock()
    assert elapsed < budget, f"runtime {elapsed:.1f}s exceeds {budget}s"
    return f"{elapsed:.1f}s < {budget:g}s"


# --- criteria -----------------------------------------------------------------


def criterion_01() -> str:
    clock = _timed(30)
    primes = primes_in_range(3, 9999)
    pairs = 0
    for p in primes:
        assert legendre_symbol(1, p) == 1  # validated call per modulus
        table = square_table(p)
        got = [legendre_symbol(a, p, validate=False) for a in range(p)]
        assert got == table, f"mismatch at p={p}"
        pairs += p
    assert legendre_symbol(17, 3) == -1
    return f"{len(primes)} primes, {pairs} (a, p) pairs exact; (17/3) = -1; {_within(clock)}"


PELL_SCAN_CAP = 200_000


def criterion_02() -> str:
    clock = _timed(60)
    scanned = deferred = 0
    for D in range(2, 201):
        if isqrt(D) ** 2 == D:
            continue
        sol = fundamental_pell(D)
        scan = pell_linear_scan(D, min(sol.U, PELL_SCAN_CAP))
        if sol.U <= PELL_SCAN_CAP:
            assert scan == (sol.T, sol.U), f"D={D}"
            scanned += 1
        else:
            # scan proves nothing smaller below the cap; chakravala pins the value
            assert scan is None and (sol.T, sol.U) == pell_chakravala(D), f"D={D}"
            deferred += 1
    s5 = fundamental_pell(5)
    assert (s5.T, s5.U) == (9, 4)
    primes = primes_in_range(3, 100, PRIMES_3_MOD_4)
    pairs = 0
    for i, b in enumerate(primes):
        for B in primes[i + 1 :]:
            r = classify_two_prime_case(b, B)
            assert r.holds() and r.sign == 1 and {r.first, r.second} == {b, B}
            pairs += 1
    return (
        f"{scanned} D by full scan, {deferred} D beyond U={PELL_SCAN_CAP} by scan+chakravala; "
        f"{pairs} prime pairs, cases 1-2 never met; {_within(clock)}"
    )


def criterion_03() -> str:
    clock = _timed(120)
    assert class_number(-20).representatives == (QuadForm(1, 0, 5), QuadForm(2, 2, 3))
    assert class_number(20).representatives == (QuadForm(1, 0, -5),)
    ds = [d for d in range(-200, 0) if d % 4 in (0, 1)]
    for d in ds:
        assert class_number(d).h == class_number_closure(d), f"d={d}"
    return f"h(-20)=2, h(20)=1 with stated forms; {len(ds)} discriminants match closure oracle; {_within(clock)}"


def criterion_04() -> str:
    checked = 0
    for n in range(1, 500):
        if math.gcd(n, 10) != 1:
            continue
        r = counting_lemma_check(-20, n)
        assert r.count in (0, r.w * 2**r.mu) and r.count == r.predicted, f"n={n}"
        checked += 1
    expected = {1: 2, 7: 4, 9: 4, 21: 8}
    got = {n: counting_lemma_check(-20, n).count for n in expected}
    assert got == expected
    return f"{checked} n < 500 exact; count(1,7,9,21) = {list(got.values())}"


def criterion_05() -> str:
    clock = _timed(300)
    forms = valid_forms(30)
    solvable = obstructed = 0
    for F in forms:
        r = solvability(F)
        assert r.solvable == (r.witness is not None), f"{F}"
        solvable += r.solvable
        if mod4_obstruction(F):
            assert r.witness is None, f"{F}"
            obstructed += 1
    return f"{len(forms)} forms, {solvable} solvable, {obstructed} all-1-mod-4 never solvable; {_within(clock)}"


def criterion_06() -> str:
    clock = _timed(30)
    report = verify_reciprocity_cases(1000)
    assert report.violations == []
    counts = " ".join(f"{c}:{n}" for c, n in report.rows())
    return f"0 violations ({counts}); {_within(clock)}"


def criterion_07() -> str:
    base = SeriesParams(2.0, 2000, 2000, 2000)
    residuals = [fundamental_identity_check(-20, base.scaled(2**k)).residual for k in range(4)]
    assert residuals[0] < 1e-2
    assert all(b <= a for a, b in zip(residuals, residuals[1:])), residuals
    return "residuals " + ", ".join(f"{r:.2e}" for r in residuals) + " (< 1e-2, non-increasing)"


def criterion_08() -> str:
    clock = _timed(300)
    targets = {-20: 2 * math.pi / math.sqrt(5), 20: math.log(9 + 4 * math.sqrt(5)) / (2 * math.sqrt(5))}
    parts = []
    for d, target in targets.items():
        r = class_number_formula_check(d)
        assert r.monotone and abs(r.closed_form - target) < 1e-12
        assert r.deviation < 0.05, f"d={d}: {r.deviation}"
        L = l_series_crosscheck(d, 10**6)
        expected = l_series_target(d)
        dev = abs(L.smoothed - expected) / expected
        assert dev < 0.01, f"d={d}: L deviation {dev}"
        parts.append(f"d={d}: {r.extrapolated:.5f} vs {target:.5f} ({r.deviation:.1e}), L dev {dev:.1e}")
    return "; ".join(parts) + f"; {_within(clock)}"


def criterion_09() -> str:
    r = teege_identity_check(5)
    derived = math.log(9 + 4 * math.sqrt(5)) / (4 * math.pi)
    assert abs(r.lhs - derived) < 1e-12, r.lhs
    # the quoted 0.22977 is 0.2297617 rounded up; allow one unit in its last place
    assert abs(r.lhs - 0.22977) < 1e-5, r.lhs
    devs = r.deviations
    assert all(b < a for a, b in zip(devs, devs[1:])), devs
    worst = 0.0
    for eps in DEFAULT_EPS_SCHEDULE:
        with_a = product_ratio(5, 1 + eps, 10**6)
        without = product_ratio(5, 1 + eps, 10**6, include_A=False)
        worst = max(worst, abs(with_a - without) / abs(without))
    assert worst <= 1e-12
    return f"LHS {r.lhs:.7f}; deviations " + ", ".join(f"{d:.3f}" for d in devs) + f" strictly decreasing; A-cancel {worst:.1e}"


def criterion_10() -> str:
    parts = []
    for target in (1, 2, 5):
        r = divergence_witness(target)
        assert r.complete and r.cutoff is not None and r.value > target
        parts.append(f"{target}->{r.cutoff}")
    terms = minorant_terms(4)
    assert terms == [Fraction(1, 3), Fraction(1, 7), Fraction(1, 11), Fraction(1, 19)]
    return "cutoffs " + ", ".join(parts) + f"; minorant head {' + '.join(str(t) for t in terms)} exact"


def criterion_11() -> str:
    clock = _timed(60)
    primes = primes_in_range(5, 9999, PRIMES_1_MOD_4)
    easy = 0
    for a in primes:
        ok, r = witness_below_check(a)
        assert ok and r.beta < a
        if a % 8 == 5:
            easy_witness(a)
            easy += 1
    return f"{len(primes)} primes with witness below a; {easy} easy constructions verified; {_within(clock)}"


def criterion_12() -> str:
    chain = teege_descent(17, 23)
    assert [(s.x, s.B, s.b_prime) for s in chain.steps] == [(12, 23, 7)] and chain.terminal == 7
    ps = primes_in_range(3, 1999, ResidueClassFilter.of(8, 1))
    chains = 0
    for p in ps:
        for B in range(p + 1, 5 * p):
            if not admissible_start(p, B):
                continue
            c = teege_descent(p, B)
            seq = c.primes
            assert all(x > y for x, y in zip(seq, seq[1:])) and c.terminal < p, (p, B)
            chains += 1
    return f"{chains} chains over {len(ps)} primes strictly decrease below p; 17: 23 -> 7 reproduced"


ROGERS_X = (10**4, 10**5, 10**6, 10**7)

# deviation from (1/4) ln x at x = 10^7, recorded after the fact (not predicted)
ROGERS_GOLDENS = {
    5: {"s1+": -0.9217684391, "s1-": -0.5122843743, "s3+": -0.4872029194, "s3-": -0.0796006851},
    13: {"s1+": -0.8206770167, "s1-": -0.4887920109, "s3+": -0.4111172244, "s3-": -0.1556863801},
    17: {"s1+": -0.9080477251, "s1-": -0.3707771143, "s3+": -0.6583041182, "s3-": 0.0915005136},
}


def criterion_13() -> str:
    """Envelope: per decade, each deviation moves no more than it did in the first
    decade, and never by more than 5% of the growth of (1/4) ln x."""
    clock = _timed(600)
    growth = math.log(10) / 4
    worst_drift = 0.0
    for D in (5, 13, 17):
        runs = [rogers_partition(D, x) for x in ROGERS_X]
        for r in runs:
            total = mertens_sum(r.x)
            assert abs(r.total - total) / total < 1e-9
            swapped = rogers_partition(-D, r.x)
            for mine, theirs in (
                (r.s1_plus, swapped.s1_plus),
                (r.s1_minus, swapped.s1_minus),
                (r.s3_plus, swapped.s3_minus),
                (r.s3_minus, swapped.s3_plus),
            ):
                assert abs(mine - theirs) <= 1e-9 * abs(mine)
        devs = [r.deviations() for r in runs]
        for key in ("s1+", "s1-", "s3+", "s3-"):
            seq = [d[key] for d in devs]
            drifts = [abs(b - a) for a, b in zip(seq, seq[1:])]
            assert all(dr <= drifts[0] for dr in drifts), (D, key, drifts)
            assert max(drifts) < 0.05 * growth, (D, key, drifts)
            worst_drift = max(worst_drift, max(drifts))
            assert abs(seq[-1] - ROGERS_GOLDENS[D][key]) < 1e-9
        counts = [r.counts["3-"] for r in runs]
        assert all(b > a for a, b in zip(counts, counts[1:])), counts
    return f"max decade drift {worst_drift:.4f} < {0.05 * growth:.4f}; identities to 1e-9; s3- counts increase; {_within(clock)}"


CRITERIA = {n: globals()[f"criterion_{n:02d}"] for n in range(1, 14)}


def _record(n: int) -> None:
    try:
        detail = CRITERIA[n]()
    except AssertionError as exc:
        RESULTS[n] = (False, f"{exc}")
        raise
    RESULTS[n] = (True, detail)


@pytest.mark.parametrize("n", list(CRITERIA))
def test_criterion(n):
    _record(n)


def summary_lines() -> list[str]:
    return [f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}" for n, (ok, detail) in sorted(RESULTS.items())]


if __name__ == "__main__":
    for n in CRITERIA:
        try:
            _record(n)
        except AssertionError:
            pass
        print(summary_lines()[-1] if RESULTS else "", flush=True)
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
