from math import gcd

import numpy as np
import pytest
from hypothesis import given, strategies as st

from reciprocity.errors import InvariantViolation, PreconditionError
from reciprocity.pell import fundamental_pell
from reciprocity.quadform import (
    Discriminant,
    QuadForm,
    class_number,
    counting_lemma_check,
    from_determinant,
    identity_constant,
    is_reduced_definite,
    lattice_points,
    proper_representations,
    reduce,
    reduction_cycle,
    representable_numbers,
    unit_count,
)

from oracles import brute_lattice_count, class_number_closure


def test_class_sets_for_twenty():
    assert class_number(-20).representatives == (QuadForm(1, 0, 5), QuadForm(2, 2, 3))
    assert class_number(20).representatives == (QuadForm(1, 0, -5),)
    assert class_number(from_determinant(-5)).h == 2


def test_reduction_goldens():
    assert reduce(QuadForm(3, 2, 2)) == QuadForm(2, 2, 3)
    assert reduce(QuadForm(1, 8, -4)) == QuadForm(1, 0, -20)
    assert reduction_cycle(QuadForm(1, 8, -4)) == [QuadForm(1, 8, -4), QuadForm(-4, 8, 1)]


def test_reduce_rejects_bad_forms():
    for Q in (QuadForm(-1, 0, -5), QuadForm(2, 0, 10), QuadForm(1, 2, 1)):
        with pytest.raises(PreconditionError):
            reduce(Q)


def test_discriminant_validation():
    for d in (2, 3, -5, 16, 0):
        with pytest.raises(PreconditionError):
            Discriminant(d)
    assert Discriminant(-20).determinant == -5 and Discriminant(-3).determinant is None


def test_unit_constants():
    assert [unit_count(d) for d in (-3, -4, -20, 20)] == [6, 4, 2, 1]
    assert [identity_constant(d) for d in (-20, 20)] == [2, 1]


@pytest.mark.parametrize("d", [d for d in range(-400, 0) if d % 4 in (0, 1)])
def test_definite_class_numbers_match_closure(d):
    assert class_number(d).h == class_number_closure(d)


@pytest.mark.parametrize(
    "d, h",
    [(5, 1), (8, 1), (13, 1), (17, 1), (29, 1), (12, 2), (21, 2), (24, 2), (28, 2), (40, 2), (60, 4), (80, 2)],
)
def test_narrow_class_numbers(d, h):
    assert class_number(d).h == h


@given(
    st.integers(1, 30),
    st.integers(-30, 30),
    st.integers(1, 30),
    st.integers(-3, 3),
    st.integers(-3, 3),
)
def test_reduce_is_a_class_invariant(a, b, c, p, q):
    Q = QuadForm(a, b, c)
    if Q.disc >= 0 or not Q.is_primitive():
        return
    # apply the unimodular substitution x -> x + p y then swap-with-sign q times
    R = QuadForm(Q.a, Q.b + 2 * Q.a * p, Q(p, 1))
    for _ in range(abs(q)):
        R = QuadForm(R.c, -R.b, R.a)
    assert reduce(R) == reduce(Q)
    assert is_reduced_definite(reduce(Q))


@given(st.sampled_from([QuadForm(1, 0, -5), QuadForm(1, 0, -20), QuadForm(4, 0, -5), QuadForm(2, 2, -3)]), st.integers(-60, 60), st.booleans())
def test_indefinite_reduce_invariant(Q, k, swap):
    R = QuadForm(Q.a, Q.b + 2 * Q.a * k, Q(k, 1))
    if swap:
        R = QuadForm(R.c, -R.b, R.a)
    assert reduce(R) == reduce(Q)


def test_representable_lists():
    assert representable_numbers(QuadForm(1, 0, 5), 30) == [0, 1, 4, 5, 6, 9, 14, 16, 20, 21, 24, 25, 29, 30]
    assert representable_numbers(QuadForm(2, 2, 3), 35) == [0, 2, 3, 7, 8, 10, 12, 15, 18, 23, 27, 28, 32, 35]


def test_representation_examples():
    assert len(proper_representations(QuadForm(3, 2, 2), 7)) == 4
    assert len(proper_representations(QuadForm(1, 0, 5), 9)) == 4
    assert proper_representations(QuadForm(1, 0, 5), 2) == []
    assert proper_representations(QuadForm(1, 0, -5), 11, domain="automorph") == [(4, 1), (16, 7)]


@pytest.mark.parametrize("Q", [QuadForm(1, 0, 5), QuadForm(2, 2, 3), QuadForm(1, 1, 1), QuadForm(3, 1, 7)])
def test_definite_counts_match_brute_force(Q):
    for m in range(1, 60):
        bound = int((4 * Q.a * Q.c * m) ** 0.5) + 2
        assert len(proper_representations(Q, m)) == brute_lattice_count(Q.a, Q.b, Q.c, m, bound)


@pytest.mark.parametrize("n, count", [(1, 2), (7, 4), (9, 4), (21, 8), (13, 0)])
def test_counting_lemma_minus_20(n, count):
    assert counting_lemma_check(-20, n).count == count


@pytest.mark.parametrize("n, count", [(1, 1), (11, 2), (19, 2), (29, 2), (31, 2), (41, 2), (9, 0)])
def test_counting_lemma_plus_20(n, count):
    assert counting_lemma_check(20, n).count == count


def test_counting_lemma_precondition():
    with pytest.raises(PreconditionError):
        counting_lemma_check(-20, 15)


def test_values_prime_to_20_represented_by_principal_indefinite_form():
    Q = QuadForm(1, 0, -5)
    _, _, v = lattice_points(Q, 99, bound=60)
    values = sorted({m for m in v.tolist() if gcd(m, 20) == 1})
    assert values == [1, 9, 11, 19, 29, 31, 41, 49, 59, 61, 71, 79, 81, 89, 99]


def _automorph(Q, pell):
    t, u = 2 * pell.T, pell.U
    return np.array([[(t - Q.b * u) // 2, -Q.c * u], [Q.a * u, (t + Q.b * u) // 2]], dtype=object)


def _in_domain(Q, pell, x, y):
    return y >= 0 and pell.U * (2 * Q.a * x + Q.b * y) > 2 * pell.T * y


def _to_domain(Q, pell, x, y):
    A = _automorph(Q, pell)
    Ainv = np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]], dtype=object)
    for _ in range(200):
        if _in_domain(Q, pell, x, y):
            return x, y
        if _in_domain(Q, pell, -x, -y):
            return -x, -y
        # move toward the domain: the ratio xi/eta shrinks under A^-1 when too large
        fx, fy = A.dot([x, y])
        bx, by = Ainv.dot([x, y])
        x, y = (bx, by) if abs(bx) + abs(by) < abs(fx) + abs(fy) else (fx, fy)
    raise AssertionError("point never reached the domain")


@pytest.mark.parametrize("Q", [QuadForm(1, 0, -5), QuadForm(1, 0, -20), QuadForm(4, 0, -5)])
def test_automorph_domain_soundness(Q):
    pell = fundamental_pell(Q.disc // 4)
    M = 1000
    x, y, v = lattice_points(Q, M, pell=pell)
    domain = set(zip(x.tolist(), y.tolist()))
    A = _automorph(Q, pell)
    for px, py in domain:
        assert _in_domain(Q, pell, px, py)
        ax, ay = A.dot([px, py])
        assert (ax, ay) not in domain and (-px, -py) not in domain
    bx, by, bv = lattice_points(Q, M, bound=120)
    images = {_to_domain(Q, pell, a, b) for a, b in zip(bx.tolist(), by.tolist())}
    assert images <= domain
    # every domain point of small height lies in the box, so it is its own image
    assert {p for p in domain if max(abs(p[0]), abs(p[1])) <= 120} <= images


def test_counting_lemma_raises_on_mismatch(monkeypatch):
    import reciprocity.quadform as qf

    monkeypatch.setattr(qf, "lemma_prediction", lambda d, n: (0, 99))
    with pytest.raises(InvariantViolation):
        qf.counting_lemma_check(-20, 1)
