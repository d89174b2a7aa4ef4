"""GL2(K) cocycle for a base point with complex multiplication by Z[tau]."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .cocycle import UNIPOTENT_LIFT, eisenstein_kernel, theta_gamma
from .domain import Mat2, OrderElement, Scalar, TorsionPoint, UpperHalfPoint, conj_scalar, to_complex
from .errors import ThetaLabError, ZeroPoint
from .isogeny import matrix_preimages
from .series import SeriesParams


@dataclass(frozen=True)
class CMContext:
    tau: UpperHalfPoint

    def __post_init__(self):
        if self.tau.cm is None:
            raise ThetaLabError("base point carries no CM structure")

    @classmethod
    def of(cls, p: int, q: int) -> "CMContext":
        return cls(UpperHalfPoint.from_cm(p, q))

    @property
    def pq(self) -> Tuple[int, int]:
        return self.tau.cm

    def element(self, s, t=0) -> OrderElement:
        p, q = self.pq
        return OrderElement(s, t, p, q)

    def lift(self, g: Mat2) -> Mat2:
        """Same matrix with every entry promoted to an order element."""
        return Mat2(*(x if isinstance(x, OrderElement) else self.element(x) for x in g.entries()))


def order_matrix(alpha: OrderElement, ctx: Optional[CMContext] = None) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    """Integer matrix of multiplication by ``alpha`` on ``(u, -v)``; its determinant is N(alpha)."""
    if ctx is not None and (alpha.p, alpha.q) != ctx.pq:
        raise ValueError("element belongs to a different order")
    if not alpha.is_integral:
        raise ValueError(f"{alpha} is not in Z[tau]")
    (a, b), (c, d) = alpha.regular_matrix()
    return ((int(a), int(b)), (int(c), int(d)))


def theta_gamma_cm(ctx: CMContext, g: Mat2, x: TorsionPoint, params: Optional[SeriesParams] = None, strict: bool = True) -> complex:
    """Conjugated cocycle on matrices over Z[tau].

    Same Bruhat assembly as the rational case with unipotent lift
    ``L conj(u) E2(z2)``; pushforward normalizations ``1/det`` stay holomorphic.
    """
    return theta_gamma(ctx.tau, g, x, params, strict)


def theta_gamma_cm_display(ctx: CMContext, g: Mat2, x: TorsionPoint, params: Optional[SeriesParams] = None, strict: bool = True) -> complex:
    """Alternative grouping ``L conj(d) / conj(c det)`` for the E2 pushforward term.

    Kept for comparison only: it differs from :func:`theta_gamma_cm` by the
    factor ``c / conj(c)`` on that term and does not satisfy the cocycle relation.
    """
    if x.is_zero():
        raise ZeroPoint("the cocycle is not evaluated at the origin")
    t = ctx.tau.tau
    kernel = eisenstein_kernel(t, params, strict)
    g, _ = g.cleared()
    a, b, c, d = g.entries()
    cb = lambda s: to_complex(conj_scalar(s), t)  # noqa: E731
    if c == 0:
        return 0j if b == 0 else UNIPOTENT_LIFT * cb(b) / cb(d) * kernel.e2_second(x)
    det = g.det
    total = UNIPOTENT_LIFT * cb(d) / cb(c * det) * sum(
        (kernel.e2_second(p) for p in matrix_preimages(Mat2(a, 1, c, 0), x).points), 0j
    )
    total += sum((kernel.e1e1(p) for p in matrix_preimages(Mat2(1, a, 0, c), x).points), 0j) / to_complex(c, t)
    total += UNIPOTENT_LIFT * cb(a) / cb(c) * kernel.e2_second(x)
    return total
