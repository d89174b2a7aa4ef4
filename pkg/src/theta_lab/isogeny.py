"""Exact preimages of torsion points under integral (or CM-integral) matrices.

A matrix ``(a b; c d)`` acts on ``T = E x E`` by ``(z1, z2) -> (a z1 + b z2, c z1 + d z2)``.
Writing ``z_j = u_j + tau w_j`` (so ``w = -v``), an order element ``s + t tau``
acts on ``(u, w)`` through the integer matrix ``[[s, tq], [t, s + tp]]`` and a
rational integer ``s`` through ``s I``.  The whole matrix is then a 4x4 integer
matrix ``A`` on ``(u1, w1, u2, w2)`` and the preimages of ``y`` are
``A^-1 (y + k)`` for ``k`` running over ``Z^4 / A Z^4``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Sequence, Tuple

from .domain import Mat2, OrderElement, TorsionPoint
from .errors import SingularMatrix, ThetaLabError

IntMatrix = Tuple[Tuple[int, ...], ...]


def _block(x) -> Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]:
    if isinstance(x, OrderElement):
        return x.regular_matrix()
    x = Fraction(x)
    return ((x, Fraction(0)), (Fraction(0), x))


def action_matrix(m: Mat2) -> IntMatrix:
    """The 4x4 integer matrix of ``m`` on ``(u1, w1, u2, w2)``."""
    if not m.is_integral:
        raise ThetaLabError(f"matrix {m} is not integral; clear denominators first")
    blocks = [[_block(m.a), _block(m.b)], [_block(m.c), _block(m.d)]]
    rows = []
    for bi in range(2):
        for r in range(2):
            row = []
            for bj in range(2):
                row.extend(int(v) for v in blocks[bi][bj][r])
            rows.append(tuple(row))
    return tuple(rows)


def _int_rows(m) -> IntMatrix:
    if isinstance(m, Mat2):
        a, b, c, d = m.int_entries()
        return ((a, b), (c, d))
    return tuple(tuple(int(v) for v in row) for row in m)


def hnf_diagonal(m: IntMatrix) -> Tuple[int, ...]:
    """Diagonal of the lower-triangular column Hermite form of a square integer matrix."""
    a = [list(row) for row in m]
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            # clear a[i][j] against the pivot a[i][i] by extended-gcd column moves
            while a[i][j] != 0:
                q = a[i][i] // a[i][j]
                for r in range(n):
                    a[r][i] -= q * a[r][j]
                for r in range(n):
                    a[r][i], a[r][j] = a[r][j], a[r][i]
        if a[i][i] == 0:
            raise SingularMatrix("matrix is singular")
        if a[i][i] < 0:
            for r in range(n):
                a[r][i] = -a[r][i]
    return tuple(a[i][i] for i in range(n))


@lru_cache(maxsize=4096)
def _coset_reps_cached(m: IntMatrix) -> Tuple[Tuple[int, ...], ...]:
    diag = hnf_diagonal(m)
    return tuple(product(*(range(h) for h in diag)))


def coset_reps(m) -> list:
    """Representatives of ``Z^n / M Z^n`` (lexicographic), ``|det M|`` of them."""
    return [tuple(k) for k in _coset_reps_cached(_int_rows(m))]


@lru_cache(maxsize=4096)
def _inverse(m: IntMatrix) -> Tuple[Tuple[Fraction, ...], ...]:
    n = len(m)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise SingularMatrix("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [vr - f * vc for vr, vc in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def _matvec(m, v):
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


def apply_matrix(m: Mat2, x: TorsionPoint) -> TorsionPoint:
    """``m . x`` on the torsion group (exact, reduced mod 1)."""
    return TorsionPoint.from_uvec(_matvec(action_matrix(m), x.uw()))


@dataclass(frozen=True)
class PreimageSet:
    source_matrix: Mat2
    target: TorsionPoint
    points: Tuple[TorsionPoint, ...]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@lru_cache(maxsize=65536)
def matrix_preimages(m: Mat2, x: TorsionPoint) -> PreimageSet:
    """All ``p`` with ``m . p = x``; ``det(m)^2`` points (``|N(det m)|^2`` over an order)."""
    a = action_matrix(m)
    inv = _inverse(a)
    y = x.uw()
    pts = tuple(
        TorsionPoint.from_uvec(_matvec(inv, [yi + ki for yi, ki in zip(y, k)]))
        for k in _coset_reps_cached(a)
    )
    return PreimageSet(m, x, pts)


PointFunction = Callable[[TorsionPoint], complex]


def pushforward_sum(m: Mat2, f: PointFunction, x: TorsionPoint) -> complex:
    """Sum of ``f`` over the preimages of ``x`` (no determinant normalization)."""
    return sum((f(p) for p in matrix_preimages(m, x).points), 0j)


def pullback(m: Mat2, f: PointFunction, x: TorsionPoint) -> complex:
    return f(apply_matrix(m, x))


def c_stabilize(f: PointFunction, c: int) -> PointFunction:
    """``x -> f(c x) - c^4 f(x)``."""
    if c <= 1:
        raise ValueError("c must exceed 1")

    def stabilized(x: TorsionPoint) -> complex:
        return f(x.scaled(c)) - c ** 4 * f(x)

    return stabilized


def solve_congruence(a: Sequence[Sequence[int]], y: Sequence[Fraction]) -> list:
    """All solutions ``X in (Q/Z)^n`` of ``A X = y mod Z^n`` for a square integer ``A``."""
    m = _int_rows(a)
    inv = _inverse(m)
    return [tuple(v % 1 for v in _matvec(inv, [yi + ki for yi, ki in zip(y, k)])) for k in _coset_reps_cached(m)]
