from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from theta_lab.domain import Mat2, OrderElement, TorsionPoint
from theta_lab.isogeny import (
    action_matrix,
    apply_matrix,
    c_stabilize,
    coset_reps,
    hnf_diagonal,
    matrix_preimages,
    solve_congruence,
)

from oracles import coset_oracle

small = st.integers(-4, 4)
frac = st.fractions(min_value=0, max_value=1, max_denominator=6)


def nonsingular(a, b, c, d):
    return a * d - b * c != 0


@settings(max_examples=40, deadline=None)
@given(small, small, small, small)
def test_coset_reps_match_exhaustive_scan(a, b, c, d):
    if not nonsingular(a, b, c, d):
        return
    m = ((a, b), (c, d))
    reps = coset_reps(m)
    assert len(reps) == abs(a * d - b * c)
    # distinct classes modulo the column lattice
    assert len(coset_oracle(m)) == len(reps)
    diag = hnf_diagonal(m)
    assert abs(diag[0] * diag[1]) == abs(a * d - b * c)


@settings(max_examples=30, deadline=None)
@given(small, small, small, small, frac, frac, frac, frac)
def test_preimages_map_back_and_count(a, b, c, d, u1, v1, u2, v2):
    if not nonsingular(a, b, c, d):
        return
    g = Mat2(a, b, c, d)
    x = TorsionPoint.of(u1, v1, u2, v2)
    pre = matrix_preimages(g, x)
    assert len(pre) == g.det ** 2
    assert len(set(pre.points)) == len(pre)
    assert all(apply_matrix(g, p) == x for p in pre)


@settings(max_examples=30, deadline=None)
@given(small, small, small, small, small, small, small, small, frac, frac, frac, frac)
def test_action_composes(a, b, c, d, e, f, g_, h, u1, v1, u2, v2):
    if not (nonsingular(a, b, c, d) and nonsingular(e, f, g_, h)):
        return
    m1, m2 = Mat2(a, b, c, d), Mat2(e, f, g_, h)
    x = TorsionPoint.of(u1, v1, u2, v2)
    assert apply_matrix(m1 @ m2, x) == apply_matrix(m1, apply_matrix(m2, x))


def test_cm_preimage_count_is_norm_of_det():
    i = OrderElement(0, 1, 0, -1)
    one = OrderElement(1, 0, 0, -1)
    g = Mat2(OrderElement(2, 1, 0, -1), one, i, OrderElement(1, 1, 0, -1))
    det = g.det
    x = TorsionPoint.of(Fraction(1, 3), 0, 0, Fraction(1, 5))
    pre = matrix_preimages(g, x)
    assert len(pre) == abs(det.norm())
    assert all(apply_matrix(g, p) == x for p in pre)


def test_action_matrix_of_gaussian_unit():
    i = OrderElement(0, 1, 0, -1)
    zero = OrderElement(0, 0, 0, -1)
    a = action_matrix(Mat2(i, zero, zero, i))
    assert a[0][:2] == (0, -1) and a[1][:2] == (1, 0)


def test_solve_congruence():
    sols = solve_congruence(((2, 0), (0, 3)), (Fraction(1, 2), 0))
    assert len(sols) == 6
    assert all((2 * s0 - Fraction(1, 2)) % 1 == 0 and (3 * s1) % 1 == 0 for s0, s1 in sols)


def test_c_stabilize():
    f = lambda p: float(p.x1.u) + 1  # noqa: E731
    g = c_stabilize(f, 2)
    x = TorsionPoint.of(Fraction(1, 3), 0, 0, 0)
    assert g(x) == pytest.approx(f(x.scaled(2)) - 16 * f(x))
    with pytest.raises(ValueError):
        c_stabilize(f, 1)
