"""Kronecker-Eisenstein series and their E1/E2 specializations.

    K_a(s, tau, z, u) = sum'_{omega in L} conj(omega + z)^a |omega + z|^(-2s) chi_u(omega),
    chi_u(omega) = exp(2 pi i Im(omega conj(u)) / y),  L = Z + tau Z.

``k_continued`` uses the incomplete-gamma split of the Mellin integral and is
valid for every s away from the two poles; ``k_direct`` is a truncated lattice
sum for the absolutely convergent range and mainly serves as a cross-check.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import rgamma

from . import _kernels
from .domain import TorsionCoord, UpperHalfPoint
from .errors import NearLatticeError, NonConvergent, PoleError, RadiusExceeded

DEFAULT_TOL = 1e-12
LATTICE_EPS = 1e-13
NEAR_LATTICE = 1e-6
ROUNDOFF = 1e-13

# dE1/dzbar = DBAR_E1 / Im(tau) away from the lattice.  Frozen from a finite
# difference at tau = i; it is -1 times the coefficient of the normalized
# volume form (i / 2y) dz ^ dzbar, i.e. d(E1 dz) = +vol.
DBAR_E1 = -0.5j
VOLUME_ORIENTATION = -1


@dataclass(frozen=True)
class SeriesParams:
    tol: float = DEFAULT_TOL
    max_radius: int = 400
    split: float = 1.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_radius < 10:
            raise ValueError("max_radius must be at least 10")
        if not self.split > 0:
            raise ValueError("split must be positive")

    @classmethod
    def from_env(cls, **overrides) -> "SeriesParams":
        """Defaults, with ``THETA_LAB_TOL`` overriding ``tol`` when set."""
        env = os.environ.get("THETA_LAB_TOL")
        base = cls(tol=float(env)) if env else cls()
        return replace(base, **overrides) if overrides else base


def _params(params):
    return params if params is not None else SeriesParams.from_env()


def _tau(tau) -> complex:
    return tau.tau if isinstance(tau, UpperHalfPoint) else complex(tau)


def lattice_coords(w: complex, tau: complex):
    """Nearest lattice point ``(m, n)`` to ``w`` and the distance to it."""
    n = round(w.imag / tau.imag)
    m = round(w.real - n * tau.real)
    return (m, n), abs(w - (m + n * tau))


def _on_lattice(w: complex, tau: complex):
    mn, dist = lattice_coords(w, tau)
    return mn if dist < LATTICE_EPS * max(1.0, abs(w)) else None


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    est_error: float


def _gamma_tail_cutoff(a, s, scale, target):
    """Smallest X whose exponential tail estimate ``scale * X^p e^-X`` is below target."""
    p = a / 2 + max(s.real - 1.0, 0.0) + 1.0
    x = 4.0
    while scale * x ** p * math.exp(-x) > target:
        x += 0.5
        if x > 5000:
            break
    return x


def k_continued_ex(a, s, tau, z, u=0j, params=None) -> SeriesValue:
    """Continued K_a with an error estimate (sum of the two tail bounds)."""
    params = _params(params)
    a = int(a)
    s = complex(s)
    tau = _tau(tau)
    z = complex(z)
    u = complex(u)
    y = tau.imag
    lam = params.split

    z_lat = _on_lattice(z, tau)
    u_lat = _on_lattice(u, tau)
    if a == 0 and u_lat is not None and s == 1:
        raise PoleError("K_0 has a pole at s = 1 for u on the lattice")
    if a == 0 and z_lat is not None and s == 0:
        raise PoleError("K_0 has a pole at s = 0 for z on the lattice")

    pref = (math.pi / y) ** s * complex(rgamma(s))
    scale = max(abs(pref), 1e-300)
    mag = max(abs(lam ** s), abs(lam ** (s - a - 1)))
    half = params.tol / 2
    x_up = _gamma_tail_cutoff(a, s, scale * mag * (1 + (y / (math.pi * lam)) ** (a / 2)), half)
    x_lo = _gamma_tail_cutoff(a, a + 1 - s, scale * mag * (1 + y ** a * (lam / (math.pi * y)) ** (a / 2)), half)
    r_up = math.sqrt(x_up * y / (math.pi * lam))
    r_lo = math.sqrt(x_lo * lam / (math.pi * y))
    if max(r_up, r_lo) > params.max_radius:
        raise RadiusExceeded(f"truncation radius {max(r_up, r_lo):.1f} exceeds {params.max_radius}")

    skip_up = (-z_lat[0], -z_lat[1]) if z_lat is not None else None
    skip_lo = u_lat
    upper, lower = _kernels.mellin_sums(a, s, tau, z, u, lam, r_up, r_lo, skip_up, skip_lo)
    total = lam ** s * upper + lam ** (s - a - 1) * lower
    if a == 0 and u_lat is not None:
        # xi = 0 term of the dual sum; its phase exp(2 pi i Re(z conj(xi))) is 1
        total += lam ** (s - 1) / (s - 1)
    if a == 0 and z_lat is not None:
        # the omitted omega = -z term, added back by the Poisson side
        m, n = z_lat
        om = complex(-m, 0) - n * tau
        chi = np.exp(2j * math.pi * (om * u.conjugate()).imag / y)
        total -= chi * lam ** s / s
    return SeriesValue(complex(pref * total), params.tol)


def k_continued(a, s, tau, z, u=0j, params=None) -> complex:
    return k_continued_ex(a, s, tau, z, u, params).value


def _continuum_tail(s, r_in, r_out, y, panels=32):
    """(1/V) * integral of |w|^(-2s) (1 - taper) over the plane, radial form."""
    nodes, weights = _kernels.GL_NODES, _kernels.GL_WEIGHTS
    edges = np.linspace(r_in, r_out, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    r = (edges[:-1, None] + half * (nodes[None, :] + 1.0)).ravel()
    t = (r - r_in) / (r_out - r_in)
    one_minus = 1.0 - np.array([_kernels._taper(float(v)) for v in t])
    band = half * np.sum(np.tile(weights, panels) * r ** (1 - 2 * s) * one_minus)
    far = r_out ** (2 - 2 * s) / (2 * s - 2)
    return 2 * math.pi / y * (band + far)


def _direct_at(a, s, tau, z, u, radius, z_lat, u_lat):
    r_in = 0.5 * radius
    skip = (-z_lat[0], -z_lat[1]) if z_lat is not None else None
    val = _kernels.direct_sum(a, s, tau, z, u, r_in, radius, skip)
    if a == 0 and u_lat is not None:
        val += _continuum_tail(s, r_in, radius, tau.imag)
    return val


def k_direct_ex(a, s, tau, z, u=0j, params=None) -> SeriesValue:
    """Lattice sum over a disk with a smooth radial cutoff.

    The cutoff is a C-infinity step on [R/2, R]; the missing far field is the
    continuum integral (non-zero only for a = 0 with trivial character), so the
    truncation error decays faster than any power of R.  R grows geometrically
    until successive values agree to ``tol``.
    """
    params = _params(params)
    a = int(a)
    s = complex(s)
    if not s.real > 1 + a / 2 + 0.5:
        raise NonConvergent(f"direct summation needs Re s > {1 + a / 2 + 0.5}")
    tau = _tau(tau)
    z = complex(z)
    u = complex(u)
    z_lat = _on_lattice(z, tau)
    u_lat = _on_lattice(u, tau)
    radius = 12.0
    prev = _direct_at(a, s, tau, z, u, radius, z_lat, u_lat)
    while True:
        radius *= 1.5
        if radius > params.max_radius:
            raise RadiusExceeded(f"direct sum did not reach tol={params.tol} within radius {params.max_radius}")
        cur = _direct_at(a, s, tau, z, u, radius, z_lat, u_lat)
        diff = abs(cur - prev)
        # a few ulps per accumulated term is the floor for any tolerance
        if diff < max(params.tol, ROUNDOFF * abs(cur)):
            return SeriesValue(cur, diff)
        prev = cur


def k_direct(a, s, tau, z, u=0j, params=None) -> complex:
    return k_direct_ex(a, s, tau, z, u, params).value


# ---------------------------------------------------------------------------
# E1, E2


def _resolve_z(tau, z):
    """``(complex z, exact-zero flag)``; torsion coordinates map to u - tau v."""
    if isinstance(z, TorsionCoord):
        return complex(float(z.u) - tau * float(z.v)), z.is_zero()
    z = complex(z)
    return z, _on_lattice(z, tau) is not None


@lru_cache(maxsize=65536)
def _e_cached(k, tau, z, tol, max_radius, split):
    params = SeriesParams(tol, max_radius, split)
    if k == 1:
        return 1j / (2 * math.pi) * k_continued(1, 1, tau, z, 0j, params)
    return -1.0 / (4 * math.pi * tau.imag) * k_continued(2, 1, tau, z, 0j, params)


def _reduce(z: complex, tau: complex) -> complex:
    # fold into the fundamental parallelogram so cache keys and sums stay small
    n = math.floor(z.imag / tau.imag)
    z = z - n * tau
    return z - math.floor(z.real)


def _e_key(tau, z):
    if isinstance(z, TorsionCoord):
        return complex(float(z.u) - tau * float(z.v))
    return _reduce(complex(z), tau)


def e1(tau, z, params=None) -> complex:
    """E1(tau, z) = (i / 2 pi) K_1(1, tau, z, 0); zero on the lattice."""
    params = _params(params)
    t = _tau(tau)
    zc, exact_zero = _resolve_z(t, z)
    if exact_zero:
        return 0j
    _, dist = lattice_coords(zc, t)
    if dist < NEAR_LATTICE:
        raise NearLatticeError(f"z is within {dist:.2e} of a lattice point")
    return _e_cached(1, t, _e_key(t, z), params.tol, params.max_radius, params.split)


def e2(tau, z, params=None) -> complex:
    """E2(tau, z) = -(1 / 4 pi y) K_2(1, tau, z, 0), regularized on the lattice."""
    params = _params(params)
    t = _tau(tau)
    zc, exact_zero = _resolve_z(t, z)
    key = 0j if exact_zero else _e_key(t, z)
    return _e_cached(2, t, key, params.tol, params.max_radius, params.split)


def periodic_bernoulli(k: int, t) -> Fraction:
    """B1^(t) = {t} - 1/2 (0 at integers), B2^(t) = {t}^2 - {t} + 1/6."""
    t = Fraction(t)
    t -= math.floor(t)
    if k == 1:
        return Fraction(0) if t == 0 else t - Fraction(1, 2)
    if k == 2:
        return t * t - t + Fraction(1, 6)
    raise ValueError("periodic_bernoulli supports k in {1, 2}")
