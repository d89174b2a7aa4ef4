"""Hecke operators T_p on the cocycle: fiberwise (coset sums) and modular (slash).

``Delta`` is the monoid of integer matrices with ``a = 1`` and ``c = 0`` mod N
(those fixing ``(1, 0)`` in ``(Z/N)^2``), and ``Gamma = Gamma_1(N)`` its units.
For ``p`` prime to ``N`` the double coset of determinant-``p`` matrices splits
as ``p + 1`` cosets ``Gamma alpha_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Tuple

from .cocycle import PointFunction, theta_gamma
from .domain import WEYL, Mat2, TorsionCoord, TorsionCycle, TorsionPoint
from .errors import BadLevel, PermutationFailure
from .isogeny import apply_matrix
from .series import SeriesParams


def in_delta(m: Mat2, level: int) -> bool:
    if not m.is_integral:
        return False
    a, _, c, _ = m.int_entries()
    return a % level == 1 % level and c % level == 0


def in_gamma1(m: Mat2, level: int) -> bool:
    if not m.is_integral:
        return False
    a, b, c, d = m.int_entries()
    return a * d - b * c == 1 and a % level == 1 % level and c % level == 0 and d % level == 1 % level


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % k for k in range(2, math.isqrt(n) + 1))


def in_gamma1_transposed(m: Mat2, level: int) -> bool:
    """Membership in ``W Gamma_1(N) W``: ``a = d = 1``, ``b = 0`` mod N."""
    return m.is_integral and in_gamma1(WEYL @ m @ WEYL, level)


@dataclass(frozen=True)
class DoubleCosetData:
    p: int
    level: int
    reps: Tuple[Mat2, ...]
    transposed: bool = False

    def __len__(self):
        return len(self.reps)

    def member(self, m: Mat2) -> bool:
        return (in_gamma1_transposed if self.transposed else in_gamma1)(m, self.level)

    def frame(self, m: Mat2) -> Mat2:
        """Carry a matrix of Gamma_1(N) into this data's frame."""
        return WEYL @ m @ WEYL if self.transposed else m

    def transpose(self) -> "DoubleCosetData":
        """Conjugate by ``W = (0 1; 1 0)``; the group becomes ``a = d = 1, b = 0`` mod N."""
        return DoubleCosetData(self.p, self.level, tuple(WEYL @ r @ WEYL for r in self.reps), not self.transposed)


def tp_reps(p: int, level: int) -> DoubleCosetData:
    """``(1 j; 0 p)`` for ``0 <= j < p`` and ``(a p, b; N p, d)`` with ``(a b; N d)`` in SL2(Z), ``a p = 1 mod N``."""
    if level < 2:
        raise BadLevel("level must exceed 1")
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if level % p == 0:
        raise BadLevel(f"p={p} divides the level {level}")
    reps = [Mat2(1, j, 0, p) for j in range(p)]
    a = pow(p, -1, level)
    # solve a d - N b = 1; a is a unit mod N so d = a^-1 mod N works after a CRT lift
    d = pow(a, -1, level)
    while (a * d - 1) % level:
        d += level
    b = (a * d - 1) // level
    reps.append(Mat2(a * p, b, level * p, d))
    data = DoubleCosetData(p, level, tuple(reps))
    for r in data.reps:
        assert r.det == p and in_delta(r, level)
    return data


def same_coset(a1: Mat2, a2: Mat2, level: int) -> bool:
    """``Gamma a1 == Gamma a2`` iff ``a1 a2^-1`` lies in Gamma_1(N).

    The relation ``alpha_i gamma = gamma_i alpha_sigma(i)`` permutes these
    cosets, so this is the equivalence the representatives must separate.
    """
    return in_gamma1(a1 @ a2.inverse(), level)


def coset_permutation(dc: DoubleCosetData, gamma: Mat2) -> List[Tuple[int, Mat2]]:
    """For each ``i`` the unique ``(sigma(i), gamma_i)`` with ``alpha_i gamma = gamma_i alpha_sigma(i)``."""
    out = []
    for i, ai in enumerate(dc.reps):
        hits = []
        for j, aj in enumerate(dc.reps):
            cand = ai @ gamma @ aj.inverse()
            if dc.member(cand):
                hits.append((j, cand))
        if len(hits) != 1:
            raise PermutationFailure(f"representative {i} has {len(hits)} matches")
        out.append(hits[0])
    if sorted(j for j, _ in out) != list(range(len(dc.reps))):
        raise PermutationFailure("coset map is not a bijection")
    return out


def fiberwise_act(alpha: Mat2, f: PointFunction, x: TorsionPoint) -> complex:
    """``(|det| alpha^-1)^* f`` at ``x``: ``f(adj(alpha) x)``, sign-corrected for ``det < 0``."""
    adj = alpha.adj()
    if alpha.det < 0:
        adj = adj.scaled(-1)
    return f(apply_matrix(adj, x))


def hecke_on_cocycle(dc: DoubleCosetData, theta_eval: Callable[[Mat2], PointFunction], gamma: Mat2, x: TorsionPoint) -> complex:
    """``sum_i alpha_i . c(gamma_i)`` at ``x`` for the fiberwise action."""
    if not dc.member(gamma):
        raise ValueError(f"{gamma} is not in the level-{dc.level} group of this coset data")
    total = 0j
    for ai, (_, gi) in zip(dc.reps, coset_permutation(dc, gamma)):
        total += fiberwise_act(ai, theta_eval(gi), x)
    return total


def slash(alpha: Mat2, tau: complex, weight: int = 2) -> Tuple[complex, complex]:
    """``(alpha tau, det^(k-1) (c tau + d)^-k)``; weight 0 carries no factor at all."""
    a, b, c, d = (float(Fraction(v)) for v in alpha.entries())
    j = c * tau + d
    if weight == 0:
        return (a * tau + b) / j, 1.0
    return (a * tau + b) / j, float(Fraction(alpha.det)) ** (weight - 1) * j ** (-weight)


def hecke_modular(dc: DoubleCosetData, F: Callable[..., complex], tau: complex, weight: int = 2, per_rep: bool = False) -> complex:
    """``sum_i det(alpha_i)^(k-1) (c_i tau + d_i)^-k F(alpha_i tau)``.

    With ``per_rep`` the callable receives the representative index as a second
    argument, for cocycle values whose matrix changes with the coset.
    """
    total = 0j
    for i, alpha in enumerate(dc.reps):
        moved, factor = slash(alpha, complex(tau), weight)
        total += factor * (F(moved, i) if per_rep else F(moved))
    return total


@dataclass(frozen=True)
class EquivarianceReport:
    lhs: complex
    rhs: complex

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)

    def residual(self, kappa: complex = 1.0) -> float:
        return abs(self.lhs - kappa * self.rhs)

    def passed(self, tol: float, kappa: complex = 1.0) -> bool:
        return self.residual(kappa) < tol


def level_point(level: int, k: int = 1) -> TorsionPoint:
    """``(0, x2)`` with ``x2 = -k tau / N`` (coordinates ``(0, k/N)``).

    Fixed by ``W Gamma_1(N) W`` under both the fiberwise and the modular
    action, and never on a lattice stratum of the E1 factors.
    """
    return TorsionPoint(TorsionCoord(0, 0), TorsionCoord(0, Fraction(k, level)))


def verify_equivariance(
    p: int,
    level: int,
    tau: complex,
    gamma: Mat2,
    x: Optional[TorsionPoint] = None,
    params: Optional[SeriesParams] = None,
) -> EquivarianceReport:
    """Fiberwise ``T_p`` of the cocycle against the weight-2 ``T_p`` of ``tau -> theta_tau[gamma](x)``.

    ``gamma`` is given in Gamma_1(N); the check runs in the transposed frame,
    where ``x = (0, x2)`` is a fixed point.
    """
    dc = tp_reps(p, level).transpose()
    g = dc.frame(gamma)
    x = x or level_point(level)
    theta_eval = lambda m: (lambda pt: theta_gamma(tau, m, pt, params))  # noqa: E731
    lhs = hecke_on_cocycle(dc, theta_eval, g, x)
    rhs = hecke_modular(dc, lambda t: theta_gamma(t, g, x, params), tau)
    return EquivarianceReport(lhs, rhs)


def fit_kappa(reports: Iterable[EquivarianceReport]) -> Tuple[complex, float]:
    """Least-squares ``kappa`` with ``lhs ~ kappa rhs``, and the worst residual."""
    reports = list(reports)
    den = sum(abs(r.rhs) ** 2 for r in reports)
    if den == 0:
        return 1.0 + 0j, max((abs(r.lhs) for r in reports), default=0.0)
    kappa = sum(r.rhs.conjugate() * r.lhs for r in reports) / den
    return kappa, max(r.residual(kappa) for r in reports)


def delta_p_cycle(p: int) -> TorsionCycle:
    """All nonzero p-torsion points whose two coordinate pairs are dependent mod p."""
    terms = []
    for a1 in range(p):
        for b1 in range(p):
            for a2 in range(p):
                for b2 in range(p):
                    if (a1, b1, a2, b2) == (0, 0, 0, 0) or (a1 * b2 - a2 * b1) % p:
                        continue
                    terms.append((1, TorsionPoint.of(Fraction(a1, p), Fraction(b1, p), Fraction(a2, p), Fraction(b2, p))))
    return TorsionCycle(tuple(terms))
