from fractions import Fraction

import numpy as np
import pytest

from theta_lab.cm import CMContext, order_matrix, theta_gamma_cm, theta_gamma_cm_display
from theta_lab.cocycle import act, theta_gamma
from theta_lab.domain import Mat2, TorsionPoint
from theta_lab.errors import SingularMatrix, ThetaLabError

X = TorsionPoint.of(Fraction(1, 3), Fraction(1, 5), Fraction(2, 7), Fraction(1, 4))


def defect(ctx, g2, g1, x, fn=theta_gamma_cm):
    lhs = fn(ctx, g2 @ g1, x)
    return lhs - act(ctx.tau, g2, lambda q: fn(ctx, g1, q))(x) - fn(ctx, g2, x)


def random_order_matrix(rng, ctx):
    while True:
        try:
            g = Mat2(*(ctx.element(int(rng.integers(-2, 3)), int(rng.integers(-2, 3))) for _ in range(4)))
        except SingularMatrix:
            continue
        if 0 < abs(g.det.norm()) <= 10:
            return g


@pytest.mark.parametrize("pq", [(0, -1), (-1, -1)])
def test_cm_cocycle_identity(pq):
    ctx = CMContext.of(*pq)
    rng = np.random.default_rng(sum(pq) + 11)
    for _ in range(4):
        g2, g1 = random_order_matrix(rng, ctx), random_order_matrix(rng, ctx)
        assert abs(defect(ctx, g2, g1, X)) < 1e-10


def test_restriction_to_integer_matrices():
    ctx = CMContext.of(0, -1)
    for g in (Mat2(2, 1, 1, 1), Mat2(1, 2, 3, -1)):
        assert abs(theta_gamma_cm(ctx, ctx.lift(g), X) - theta_gamma(ctx.tau.tau, g, X)) < 1e-12


def test_display_grouping_breaks_identity():
    ctx = CMContext.of(0, -1)
    e = ctx.element
    g1, g2 = Mat2(e(1, 1), e(2), e(1, -1), e(3, 1)), Mat2(e(2), e(0, 1), e(1), e(1, 1))
    assert abs(defect(ctx, g2, g1, X, theta_gamma_cm_display)) > 1e-3
    assert abs(defect(ctx, g2, g1, X)) < 1e-12


def test_order_matrix_determinant_is_norm():
    ctx = CMContext.of(-1, -1)
    a = ctx.element(2, 3)
    (p, q), (r, s) = order_matrix(a, ctx)
    assert p * s - q * r == a.norm()


def test_context_requires_cm_point():
    from theta_lab.domain import UpperHalfPoint

    with pytest.raises(ThetaLabError):
        CMContext(UpperHalfPoint(0.3 + 1j))
