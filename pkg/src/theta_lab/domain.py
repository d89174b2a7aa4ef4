"""Exact value types: base points, torsion coordinates, cycles, 2x2 matrices.

Torsion data is always held as :class:`fractions.Fraction`; only the final
embedding into ``C`` goes through floating point.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

from .errors import ParseError, SingularMatrix, ZeroPoint

CM_TOL = 1e-12


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def _mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


# ---------------------------------------------------------------------------
# base point


@dataclass(frozen=True)
class UpperHalfPoint:
    """A point ``tau`` of the upper half plane, optionally with CM data.

    ``cm = (p, q)`` asserts ``tau**2 == p*tau + q`` with ``p**2 + 4q < 0``,
    so that ``Z[tau]`` acts on the lattice ``Z + Z tau``.
    """

    tau: complex
    cm: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        tau = complex(self.tau)
        object.__setattr__(self, "tau", tau)
        if not tau.imag > 0:
            raise ValueError(f"Im tau must be positive, got {tau!r}")
        if self.cm is not None:
            p, q = (int(t) for t in self.cm)
            object.__setattr__(self, "cm", (p, q))
            if p * p + 4 * q >= 0:
                raise ValueError(f"cm discriminant {p * p + 4 * q} is not negative")
            if abs(tau * tau - p * tau - q) > CM_TOL * max(1.0, abs(tau) ** 2):
                raise ValueError(f"tau={tau!r} does not satisfy tau^2 = {p} tau + {q}")

    @property
    def y(self) -> float:
        return self.tau.imag

    @classmethod
    def from_cm(cls, p: int, q: int) -> "UpperHalfPoint":
        disc = p * p + 4 * q
        if disc >= 0:
            raise ValueError(f"cm discriminant {disc} is not negative")
        return cls(complex(p / 2, math.sqrt(-disc) / 2), (p, q))

    def moved(self, tau: complex) -> "UpperHalfPoint":
        """Same structure-free point at another location (CM data dropped)."""
        return UpperHalfPoint(tau)


# ---------------------------------------------------------------------------
# torsion


@dataclass(frozen=True, order=True)
class TorsionCoord:
    """Rational coordinates ``(u, v)`` of ``z = u - tau*v`` reduced into [0,1)."""

    u: Fraction
    v: Fraction

    def __post_init__(self):
        object.__setattr__(self, "u", _mod1(_frac(self.u)))
        object.__setattr__(self, "v", _mod1(_frac(self.v)))

    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    def __neg__(self) -> "TorsionCoord":
        return TorsionCoord(-self.u, -self.v)

    def __add__(self, other: "TorsionCoord") -> "TorsionCoord":
        return TorsionCoord(self.u + other.u, self.v + other.v)

    def scaled(self, n: int) -> "TorsionCoord":
        return TorsionCoord(n * self.u, n * self.v)

    @property
    def order(self) -> int:
        return math.lcm(self.u.denominator, self.v.denominator)

    def __str__(self) -> str:
        return f"{self.u},{self.v}"


def normalize(coord: TorsionCoord) -> TorsionCoord:
    return TorsionCoord(coord.u, coord.v)


def embed(coord: TorsionCoord, tau: Union[UpperHalfPoint, complex]) -> complex:
    t = tau.tau if isinstance(tau, UpperHalfPoint) else complex(tau)
    return float(coord.u) - t * float(coord.v)


@dataclass(frozen=True, order=True)
class TorsionPoint:
    """A torsion point ``(z1, z2)`` of the squared curve."""

    x1: TorsionCoord
    x2: TorsionCoord

    @classmethod
    def of(cls, u1, v1, u2, v2) -> "TorsionPoint":
        return cls(TorsionCoord(u1, v1), TorsionCoord(u2, v2))

    @classmethod
    def from_uvec(cls, uw: Sequence[Fraction]) -> "TorsionPoint":
        """Build from ``(u1, w1, u2, w2)`` with ``w = -v``."""
        u1, w1, u2, w2 = uw
        return cls(TorsionCoord(u1, -w1), TorsionCoord(u2, -w2))

    def uw(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        """Coordinates ``(u1, w1, u2, w2)`` with ``z_j = u_j + tau*w_j``."""
        return (self.x1.u, -self.x1.v, self.x2.u, -self.x2.v)

    def is_zero(self) -> bool:
        return self.x1.is_zero() and self.x2.is_zero()

    def __neg__(self) -> "TorsionPoint":
        return TorsionPoint(-self.x1, -self.x2)

    def __add__(self, other: "TorsionPoint") -> "TorsionPoint":
        return TorsionPoint(self.x1 + other.x1, self.x2 + other.x2)

    def scaled(self, n: int) -> "TorsionPoint":
        return TorsionPoint(self.x1.scaled(n), self.x2.scaled(n))

    @property
    def order(self) -> int:
        return math.lcm(self.x1.order, self.x2.order)

    def embed(self, tau) -> Tuple[complex, complex]:
        return embed(self.x1, tau), embed(self.x2, tau)

    def __str__(self) -> str:
        return f"{self.x1};{self.x2}"


@dataclass(frozen=True)
class TorsionCycle:
    """Finite integer combination of nonzero torsion points.

    Terms are merged on construction, zero coefficients dropped and the
    remaining terms sorted, so equal cycles compare equal.
    """

    terms: Tuple[Tuple[int, TorsionPoint], ...] = field(default=())

    def __post_init__(self):
        acc = {}
        for coeff, pt in self.terms:
            if not isinstance(pt, TorsionPoint):
                raise TypeError("cycle terms must be (int, TorsionPoint)")
            if pt.is_zero():
                raise ZeroPoint("torsion cycles may not contain the zero point")
            acc[pt] = acc.get(pt, 0) + int(coeff)
        merged = tuple(sorted(((c, p) for p, c in acc.items() if c != 0), key=lambda t: t[1]))
        object.__setattr__(self, "terms", merged)

    @classmethod
    def single(cls, pt: TorsionPoint, coeff: int = 1) -> "TorsionCycle":
        return cls(((coeff, pt),))

    def __iter__(self) -> Iterator[Tuple[int, TorsionPoint]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "TorsionCycle") -> "TorsionCycle":
        return TorsionCycle(self.terms + other.terms)

    def __rmul__(self, k: int) -> "TorsionCycle":
        return TorsionCycle(tuple((k * c, p) for c, p in self.terms))

    def points(self) -> Tuple[TorsionPoint, ...]:
        return tuple(p for _, p in self.terms)


# ---------------------------------------------------------------------------
# scalars of an imaginary quadratic order


@dataclass(frozen=True)
class OrderElement:
    """``s + t*tau`` in ``Q(tau)`` where ``tau**2 = p*tau + q``.

    Coefficients are rational so that quotients (needed by the Bruhat
    factorization over K) stay exact; :attr:`is_integral` tells whether the
    element lies in the order ``Z[tau]``.
    """

    s: Fraction
    t: Fraction
    p: int
    q: int

    def __post_init__(self):
        object.__setattr__(self, "s", _frac(self.s))
        object.__setattr__(self, "t", _frac(self.t))

    def _lift(self, other) -> "OrderElement":
        if isinstance(other, OrderElement):
            if (other.p, other.q) != (self.p, self.q):
                raise ValueError("mixing elements of different quadratic fields")
            return other
        return OrderElement(_frac(other), 0, self.p, self.q)

    def __add__(self, other):
        o = self._lift(other)
        return OrderElement(self.s + o.s, self.t + o.t, self.p, self.q)

    __radd__ = __add__

    def __neg__(self):
        return OrderElement(-self.s, -self.t, self.p, self.q)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        s1, t1, s2, t2 = self.s, self.t, o.s, o.t
        return OrderElement(
            s1 * s2 + t1 * t2 * self.q,
            s1 * t2 + t1 * s2 + t1 * t2 * self.p,
            self.p,
            self.q,
        )

    __rmul__ = __mul__

    def conj(self) -> "OrderElement":
        # conj(tau) = p - tau
        return OrderElement(self.s + self.t * self.p, -self.t, self.p, self.q)

    def norm(self) -> Fraction:
        return self.s * self.s + self.s * self.t * self.p - self.t * self.t * self.q

    def __truediv__(self, other):
        o = self._lift(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        num = self * o.conj()
        return OrderElement(num.s / n, num.t / n, self.p, self.q)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __eq__(self, other):
        if isinstance(other, OrderElement):
            return (self.s, self.t, self.p, self.q) == (other.s, other.t, other.p, other.q)
        if isinstance(other, (int, Fraction)):
            return self.t == 0 and self.s == other
        return NotImplemented

    def __hash__(self):
        if self.t == 0:
            return hash(self.s)
        return hash((self.s, self.t, self.p, self.q))

    @property
    def is_integral(self) -> bool:
        return self.s.denominator == 1 and self.t.denominator == 1

    @property
    def is_rational(self) -> bool:
        return self.t == 0

    def denominator(self) -> int:
        """Least positive integer ``n`` with ``n*self`` in ``Z[tau]``."""
        return math.lcm(self.s.denominator, self.t.denominator)

    def to_complex(self, tau: complex) -> complex:
        return float(self.s) + float(self.t) * complex(tau)

    def regular_matrix(self) -> Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]:
        """Matrix of multiplication on ``(u, w)`` where ``z = u + tau*w``."""
        s, t = self.s, self.t
        return ((s, t * self.q), (t, s + t * self.p))

    def __str__(self) -> str:
        if self.t == 0:
            return str(self.s)
        return f"{self.s}+{self.t}*tau"


Scalar = Union[int, Fraction, OrderElement]


def to_complex(x: Scalar, tau: complex = 0j) -> complex:
    if isinstance(x, OrderElement):
        return x.to_complex(tau)
    return complex(float(x))


def conj_scalar(x: Scalar) -> Scalar:
    return x.conj() if isinstance(x, OrderElement) else x


def scalar_denominator(x: Scalar) -> int:
    if isinstance(x, OrderElement):
        return x.denominator()
    return Fraction(x).denominator


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class Mat2:
    """2x2 matrix ``(a b; c d)`` with exact entries and nonzero determinant."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def __post_init__(self):
        for name in "abcd":
            x = getattr(self, name)
            if isinstance(x, (int, Rational)) and not isinstance(x, Fraction):
                object.__setattr__(self, name, Fraction(x))
            elif not isinstance(x, (Fraction, OrderElement)):
                raise TypeError(f"matrix entry {name} must be exact, got {type(x).__name__}")
        if self.det == 0:
            raise SingularMatrix(f"singular matrix {self}")

    @classmethod
    def of(cls, a, b, c, d) -> "Mat2":
        return cls(a, b, c, d)

    @property
    def det(self) -> Scalar:
        return self.a * self.d - self.b * self.c

    def entries(self) -> Tuple[Scalar, Scalar, Scalar, Scalar]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def adj(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def inverse(self) -> "Mat2":
        det = self.det
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def scaled(self, k: Scalar) -> "Mat2":
        return Mat2(k * self.a, k * self.b, k * self.c, k * self.d)

    @property
    def is_cm(self) -> bool:
        return any(isinstance(x, OrderElement) and not x.is_rational for x in self.entries())

    @property
    def is_integral(self) -> bool:
        return all(scalar_denominator(x) == 1 for x in self.entries())

    def denominator(self) -> int:
        return math.lcm(*(scalar_denominator(x) for x in self.entries()))

    def cleared(self) -> Tuple["Mat2", int]:
        """``(n*self, n)`` for the least positive ``n`` making the matrix integral."""
        n = self.denominator()
        return (self if n == 1 else self.scaled(n)), n

    def int_entries(self) -> Tuple[int, int, int, int]:
        out = []
        for x in self.entries():
            if isinstance(x, OrderElement):
                if not x.is_rational:
                    raise TypeError("matrix has non-rational entries")
                x = x.s
            if Fraction(x).denominator != 1:
                raise TypeError("matrix is not integral")
            out.append(int(x))
        return tuple(out)

    def act_on_tau(self, tau: complex) -> complex:
        a, b, c, d = (float(Fraction(x)) for x in self.entries())
        return (a * tau + b) / (c * tau + d)

    def __str__(self) -> str:
        return f"{self.a},{self.b};{self.c},{self.d}"


IDENTITY = Mat2(1, 0, 0, 1)
WEYL = Mat2(0, 1, 1, 0)


def diag(d1: Scalar, d2: Scalar) -> Mat2:
    return Mat2(d1, 0, 0, d2)


def unipotent(u: Scalar) -> Mat2:
    return Mat2(1, u, 0, 1)


# ---------------------------------------------------------------------------
# string formats


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}") from exc


def parse_coord(text: str) -> TorsionCoord:
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError(f"torsion coordinate must be 'u,v', got {text!r}")
    return TorsionCoord(parse_rational(parts[0]), parse_rational(parts[1]))


def parse_point(text: str) -> TorsionPoint:
    parts = text.split(";")
    if len(parts) != 2:
        raise ParseError(f"torsion point must be 'u1,v1;u2,v2', got {text!r}")
    return TorsionPoint(parse_coord(parts[0]), parse_coord(parts[1]))


def parse_cycle(text: str) -> TorsionCycle:
    """``"t1*u1,v1;u2,v2 + t2*..."``; a bare point means coefficient 1."""
    terms = []
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "*" in chunk:
            coeff, pt = chunk.split("*", 1)
            try:
                c = int(coeff)
            except ValueError as exc:
                raise ParseError(f"bad cycle coefficient {coeff!r}") from exc
        else:
            c, pt = 1, chunk
        terms.append((c, parse_point(pt)))
    if not terms:
        raise ParseError("empty cycle")
    try:
        return TorsionCycle(tuple(terms))
    except ZeroPoint as exc:
        raise ParseError(str(exc)) from exc


_CM_ENTRY = re.compile(r"^([+-]?\d+(?:/\d+)?)??([+-]?)(\d+(?:/\d+)?)?tau$")


def parse_scalar(text: str, cm: Optional[Tuple[int, int]] = None) -> Scalar:
    """Rational, or with ``cm`` set, an element written ``s+t*tau``, ``tau``, ``-2tau``."""
    body = text.strip().replace(" ", "").replace("*", "")
    if cm is None or "tau" not in body:
        return parse_rational(body)
    m = _CM_ENTRY.match(body)
    if not m:
        raise ParseError(f"bad order element {text!r}")
    s = Fraction(m.group(1)) if m.group(1) else Fraction(0)
    t = Fraction(m.group(3)) if m.group(3) else Fraction(1)
    if m.group(2) == "-":
        t = -t
    return OrderElement(s, t, *cm)


def parse_matrix(text: str, cm: Optional[Tuple[int, int]] = None) -> Mat2:
    rows = text.split(";")
    if len(rows) != 2:
        raise ParseError(f"matrix must be 'a,b;c,d', got {text!r}")
    cells = [c for r in rows for c in r.split(",")]
    if len(cells) != 4:
        raise ParseError(f"matrix must be 'a,b;c,d', got {text!r}")
    vals = [parse_scalar(c, cm) for c in cells]
    if cm is not None:
        vals = [v if isinstance(v, OrderElement) else OrderElement(v, 0, *cm) for v in vals]
    try:
        return Mat2(*vals)
    except SingularMatrix as exc:
        raise ParseError(str(exc)) from exc


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("*i", "j").replace("i", "j")
    if t in ("j", "+j"):
        return 1j
    if t == "-j":
        return -1j
    t = re.sub(r"(^|[+-])j", r"\g<1>1j", t)
    try:
        return complex(t)
    except ValueError as exc:
        raise ParseError(f"bad complex number {text!r}") from exc


def parse_tau(text: str) -> UpperHalfPoint:
    """Accepts ``i``, ``x+yi`` (or ``x+y*i``) and ``cm:p,q``."""
    text = text.strip()
    try:
        if text.startswith("cm:"):
            p, q = (int(s) for s in text[3:].split(","))
            return UpperHalfPoint.from_cm(p, q)
        return UpperHalfPoint(parse_complex(text))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"bad tau {text!r}: {exc}") from exc


def format_complex(z: complex) -> str:
    return f"{z.real!r}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{abs(z.imag)!r}*i"


def iter_torsion(n: int) -> Iterable[TorsionCoord]:
    """All ``n``-torsion coordinates in lexicographic order."""
    for i in range(n):
        for j in range(n):
            yield TorsionCoord(Fraction(i, n), Fraction(j, n))
