"""Bruhat factorization ``GL2 = B w B`` into tagged generator factors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Tuple, Union

from .domain import IDENTITY, WEYL, Mat2, Scalar, diag, unipotent


@dataclass(frozen=True)
class Unipotent:
    u: Scalar

    @property
    def matrix(self) -> Mat2:
        return unipotent(self.u)


@dataclass(frozen=True)
class Diagonal:
    d1: Scalar
    d2: Scalar

    @property
    def matrix(self) -> Mat2:
        return diag(self.d1, self.d2)


@dataclass(frozen=True)
class Weyl:
    @property
    def matrix(self) -> Mat2:
        return WEYL


Factor = Union[Unipotent, Diagonal, Weyl]


@dataclass(frozen=True)
class BruhatFactorization:
    factors: Tuple[Factor, ...]

    def product(self) -> Mat2:
        return multiply(f.matrix for f in self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)


def multiply(mats: Iterable[Mat2]) -> Mat2:
    out = IDENTITY
    for m in mats:
        out = out @ m
    return out


def bruhat_factor(g: Mat2) -> BruhatFactorization:
    """Factor ``g`` left to right.

    ``c != 0``: U(a/c) D(1, c) w U(-d/det) D(1, -det/c);  ``c == 0``: U(b/d) D(a, d).
    """
    a, b, c, d = g.entries()
    if c == 0:
        return BruhatFactorization((Unipotent(b / d), Diagonal(a, d)))
    det = g.det
    return BruhatFactorization(
        (
            Unipotent(a / c),
            Diagonal(1, c),
            Weyl(),
            Unipotent(-d / det),
            Diagonal(1, -det / c),
        )
    )


def factor_word(word: Iterable[Union[Mat2, Factor]]) -> BruhatFactorization:
    """Concatenate the factorizations of a word; tagged factors pass through."""
    out = []
    for g in word:
        if isinstance(g, (Unipotent, Diagonal, Weyl)):
            out.append(g)
        else:
            out.extend(bruhat_factor(g).factors)
    return BruhatFactorization(tuple(out))
