"""The theta cocycle ``theta_tau[g]`` on torsion points of ``E_tau x E_tau``.

Values are coefficient functions of ``dz1 ^ dz2``; a matrix acts on them by
form pushforward ``(g . f)(x) = det(g)^-1 sum_{g p = x} f(p)``.  The closed form
comes from the Bruhat factorization with base lifts

    diagonal -> 0,   w -> E1(z1) E1(z2),   (1 u; 0 1) -> L conj(u) E2(z2)

(``conj`` is the identity on rationals and complex conjugation over an
imaginary quadratic order).  The unipotent constant ``L`` is fixed by
dbar(L u E2(z2)) matching (g_u - 1) applied to the E1 current, i.e. by the
actual value of dE1/dzbar: ``L = 2 DBAR_E1 / i = -1``.  A volume form
normalized as (2i/y) dz ^ dzbar would give 4 instead, which breaks the
cocycle relation for E1, E2 as normalized here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

from .bruhat import BruhatFactorization, Diagonal, Factor, Unipotent, Weyl, factor_word
from .domain import Mat2, Scalar, TorsionCoord, TorsionCycle, TorsionPoint, UpperHalfPoint, conj_scalar, to_complex
from .errors import BadAuxiliary, DegenerateStratum, SingularEvaluation, StabilizerViolation, ZeroPoint
from .isogeny import apply_matrix, matrix_preimages
from .series import DBAR_E1, SeriesParams, e1, e2, periodic_bernoulli

PointFunction = Callable[[TorsionPoint], complex]

UNIPOTENT_LIFT = (2 * DBAR_E1 / 1j).real

# Cusp limits at tau = iy, y -> oo, for z = u - tau v with v != 0:
#   E1 -> B1^(v),   E2 -> -1/2 B2^(v)
BERNOULLI_E1 = 1.0
BERNOULLI_E2 = -0.5


@dataclass(frozen=True)
class Kernel:
    """The two special functions the cocycle is assembled from."""

    e1: Callable[[TorsionCoord], complex]
    e2: Callable[[TorsionCoord], complex]
    strict: bool = True

    def e1e1(self, p: TorsionPoint) -> complex:
        if p.x1.is_zero() or p.x2.is_zero():
            if self.strict:
                raise SingularEvaluation(f"E1 factor on the lattice at {p}")
            return 0j
        return self.e1(p.x1) * self.e1(p.x2)

    def e2_second(self, p: TorsionPoint) -> complex:
        return self.e2(p.x2)


def eisenstein_kernel(tau, params: Optional[SeriesParams] = None, strict: bool = True) -> Kernel:
    t = tau.tau if isinstance(tau, UpperHalfPoint) else complex(tau)
    return Kernel(lambda c: e1(t, c, params), lambda c: e2(t, c, params), strict)


def bernoulli_kernel(strict: bool = True) -> Kernel:
    """Cusp limit kernel; E1 has no Bernoulli limit on the v = 0 stratum."""

    def b1(c: TorsionCoord) -> complex:
        if c.v == 0 and c.u != 0:
            raise DegenerateStratum(f"E1 at {c} tends to a cotangent value, not a Bernoulli value")
        return BERNOULLI_E1 * float(periodic_bernoulli(1, c.v))

    def b2(c: TorsionCoord) -> complex:
        return BERNOULLI_E2 * float(periodic_bernoulli(2, c.v))

    return Kernel(b1, b2, strict)


def _tau_of(tau) -> complex:
    return tau.tau if isinstance(tau, UpperHalfPoint) else complex(tau)


def _cx(x: Scalar, tau: complex) -> complex:
    return to_complex(x, tau)


def _cx_bar(x: Scalar, tau: complex) -> complex:
    return to_complex(conj_scalar(x), tau)


def act(tau, g: Mat2, f: PointFunction) -> PointFunction:
    """Form pushforward ``det(g)^-1 sum_{g p = x} f(p)``.

    Rational ``g`` is replaced by its integral multiple ``n g``: scalars act
    trivially on E1 E1 and E2 values (distribution relations), so the result
    is unchanged.
    """
    t = _tau_of(tau)
    m, _ = g.cleared()
    inv_det = 1 / _cx(m.det, t)

    def pushed(x: TorsionPoint) -> complex:
        return inv_det * sum((f(p) for p in matrix_preimages(m, x).points), 0j)

    return pushed


def _base(factor: Factor, kernel: Kernel, tau: complex) -> Optional[PointFunction]:
    if isinstance(factor, Diagonal):
        return None
    if isinstance(factor, Weyl):
        return kernel.e1e1
    if factor.u == 0:
        return None
    coeff = UNIPOTENT_LIFT * _cx_bar(factor.u, tau)
    return lambda p: coeff * kernel.e2_second(p)


def theta_telescoped(
    tau,
    word: Union[BruhatFactorization, Sequence],
    x: TorsionPoint,
    params: Optional[SeriesParams] = None,
    strict: bool = True,
    kernel: Optional[Kernel] = None,
) -> complex:
    """Evaluate through ``zeta(g1 ... gn) = sum_k (g1 ... g_{k-1}) . zeta(g_k)``."""
    if x.is_zero():
        raise ZeroPoint("the cocycle is not evaluated at the origin")
    t = _tau_of(tau)
    kernel = kernel or eisenstein_kernel(t, params, strict)
    factors = word.factors if isinstance(word, BruhatFactorization) else factor_word(word).factors
    total = 0j
    prefix: Optional[Mat2] = None
    for fac in factors:
        base = _base(fac, kernel, t)
        if base is not None:
            total += base(x) if prefix is None else act(t, prefix, base)(x)
        prefix = fac.matrix if prefix is None else prefix @ fac.matrix
    return total


def theta_gamma(
    tau,
    g: Mat2,
    x: TorsionPoint,
    params: Optional[SeriesParams] = None,
    strict: bool = True,
    kernel: Optional[Kernel] = None,
) -> complex:
    """Closed form of ``theta_tau[g](x)``.

    ``c == 0``: L conj(b/d) E2(x2).  Otherwise, with ``det = ad - bc``,

        (L conj(d/det) / c) sum_{(a 1; c 0) p = x} E2(p2)
      + (1/c)              sum_{(1 a; 0 c) p = x} E1(p1) E1(p2)
      + L conj(a/c) E2(x2)

    with ``L = UNIPOTENT_LIFT``, evaluated after scaling ``g`` to an integral matrix.
    """
    if x.is_zero():
        raise ZeroPoint("the cocycle is not evaluated at the origin")
    t = _tau_of(tau)
    kernel = kernel or eisenstein_kernel(t, params, strict)
    g, _ = g.cleared()
    a, b, c, d = g.entries()
    if c == 0:
        if b == 0:
            return 0j
        return UNIPOTENT_LIFT * _cx_bar(b / d, t) * kernel.e2_second(x)
    det = g.det
    c_cx = _cx(c, t)
    total = 0j
    if d != 0:
        coeff = UNIPOTENT_LIFT * _cx_bar(d / det, t) / c_cx
        total += coeff * sum((kernel.e2_second(p) for p in matrix_preimages(Mat2(a, 1, c, 0), x).points), 0j)
    total += sum((kernel.e1e1(p) for p in matrix_preimages(Mat2(1, a, 0, c), x).points), 0j) / c_cx
    if a != 0:
        total += UNIPOTENT_LIFT * _cx_bar(a / c, t) * kernel.e2_second(x)
    return total


def theta_value(tau, g: Mat2, params=None, strict=True, kernel=None) -> PointFunction:
    return lambda x: theta_gamma(tau, g, x, params, strict, kernel)


def theta_cycle(tau, g: Mat2, cycle: TorsionCycle, params=None, strict=True, kernel=None) -> complex:
    return sum((coeff * theta_gamma(tau, g, p, params, strict, kernel) for coeff, p in cycle), 0j)


def cocycle_defect(tau, g2: Mat2, g1: Mat2, x: TorsionPoint, params=None, strict=True) -> complex:
    """``theta[g2 g1] - (g2 . theta[g1] + theta[g2])`` at ``x``."""
    lhs = theta_gamma(tau, g2 @ g1, x, params, strict)
    rhs = act(tau, g2, theta_value(tau, g1, params, strict))(x) + theta_gamma(tau, g2, x, params, strict)
    return lhs - rhs


# ---------------------------------------------------------------------------
# SL2(Z) simplification


def _second_coordinate_image(g: Mat2, x: TorsionPoint) -> TorsionCoord:
    """Second factor of ``g^-1 x`` for ``g`` in SL2(Z): ``(-c u1 + a u2, -c v1 + a v2)``."""
    a, _, c, _ = g.int_entries()
    return TorsionCoord(-c * x.x1.u + a * x.x2.u, -c * x.x1.v + a * x.x2.v)


def check_stabilizer(g: Mat2, cycle: TorsionCycle) -> None:
    """Raise unless the weighted second coordinates of ``g^-1 x_i`` match those of ``x_i``.

    This is the exact hypothesis ``a v_i - c u_i = v_sigma(i)`` read on the
    second factor, allowing for coefficients.
    """
    want: dict = {}
    for coeff, p in cycle:
        want[p.x2] = want.get(p.x2, 0) + coeff
    have: dict = {}
    for coeff, p in cycle:
        key = _second_coordinate_image(g, p)
        have[key] = have.get(key, 0) + coeff
    for idx, (coeff, p) in enumerate(cycle):
        key = _second_coordinate_image(g, p)
        if have.get(key, 0) != want.get(key, 0):
            raise StabilizerViolation(idx)
    if {k: v for k, v in have.items() if v} != {k: v for k, v in want.items() if v}:
        raise StabilizerViolation(len(cycle) - 1)


def first_term(tau, g: Mat2, cycle: TorsionCycle, params=None) -> complex:
    """``sum_i t_i (L d / (c det)) sum_{(a 1; c 0) p = x_i} E2(p2)`` evaluated directly."""
    t = _tau_of(tau)
    a, b, c, d = g.int_entries()
    if d == 0:
        return 0j
    det = a * d - b * c
    pre = Mat2(a, 1, c, 0)
    coeff = UNIPOTENT_LIFT * d / (c * det)
    return sum(
        (k * coeff * sum((e2(t, p.x2, params) for p in matrix_preimages(pre, x).points), 0j) for k, x in cycle),
        0j,
    )


def sl2_first_term(tau, g: Mat2, cycle: TorsionCycle, params=None) -> complex:
    """Simplified first term ``(L d/c) sum_i t_i E2(v_i)`` for ``g`` in SL2(Z), ``c != 0``."""
    a, b, c, d = g.int_entries()
    if a * d - b * c != 1 or c == 0:
        raise ValueError("sl2_first_term needs g in SL2(Z) with c != 0")
    check_stabilizer(g, cycle)
    if d == 0:
        return 0j
    t = _tau_of(tau)
    return UNIPOTENT_LIFT * d / c * sum((k * e2(t, p.x2, params) for k, p in cycle), 0j)


def orbit_cycle(g: Mat2, seed: TorsionPoint) -> TorsionCycle:
    """The cycle ``sum_k g^k seed`` over the (finite) orbit of ``seed``."""
    pts: List[TorsionPoint] = [seed]
    cur = apply_matrix(g, seed)
    while cur != seed:
        pts.append(cur)
        cur = apply_matrix(g, cur)
    return TorsionCycle(tuple((1, p) for p in pts))


# ---------------------------------------------------------------------------
# cusp degeneration and c-stabilization


@dataclass(frozen=True)
class CuspReport:
    ys: Tuple[float, ...]
    values: Tuple[complex, ...]
    bernoulli: complex
    ratios: Tuple[complex, ...]
    stable: bool

    @property
    def limit(self) -> complex:
        return self.ratios[-1]


def cusp_degeneration(g: Mat2, x: TorsionPoint, y_ladder: Iterable[float], params=None, strict=True, tol=1e-3) -> CuspReport:
    ys = tuple(float(y) for y in y_ladder)
    if any(b <= a for a, b in zip(ys, ys[1:])) or min(ys) < 10:
        raise ValueError("y_ladder must be increasing with entries >= 10")
    bern = theta_gamma(1j, g, x, params, strict, kernel=bernoulli_kernel(strict))
    values = tuple(theta_gamma(1j * y, g, x, params, strict) for y in ys)
    if bern == 0:
        ratios = tuple(complex(1.0 if abs(v) < tol else math.inf) for v in values)
    else:
        ratios = tuple(v / bern for v in values)
    stable = all(abs(r2 - r1) < tol for r1, r2 in zip(ratios, ratios[1:]))
    return CuspReport(ys, values, bern, ratios, stable)


def theta_stabilized(tau, g: Mat2, cycle: TorsionCycle, c: int, level: int, params=None, strict=True) -> complex:
    """``(1 - c^4) theta_cycle`` for an auxiliary ``c = 1 mod N``."""
    if c <= 1 or c % level != 1 % level:
        raise BadAuxiliary(f"auxiliary c={c} must exceed 1 and be 1 mod {level}")
    return (1 - c ** 4) * theta_cycle(tau, g, cycle, params, strict)
