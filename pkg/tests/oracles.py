"""Independent reference evaluators.

None of these share code with ``theta_lab.series``:

* ``e1_fourier`` / ``e2_fourier`` sum E1, E2 row by row along Z + tau Z using
  the cotangent (q-series) form of each row, which converges exponentially.
* ``k_rows`` evaluates K_a(s, tau, z, 0) with mpmath by splitting every row
  sum into a Hurwitz-zeta main term and a Bessel-K tail (Chowla-Selberg), and
  obtains a = 1, 2 from a = 0 by differentiating in z:
  K_1(s) = -1/(s-1) dK_0(s-1)/dz,  K_2(s) = 1/((s-1)(s-2)) d^2 K_0(s-2)/dz^2.
* ``coset_oracle`` brute-forces Z^2 / M Z^2 by scanning a box.
"""

from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction

import mpmath as mp


def _rows(tau, z, reach):
    y = tau.imag
    base = math.floor(-z.imag / y)
    for n in range(base - reach, base + reach + 2):
        yield z + n * tau


def e1_fourier(tau: complex, z: complex, reach: int = 40) -> complex:
    y = tau.imag
    q = z.imag / y - math.floor(z.imag / y)
    total = -1j * math.pi * (1 - 2 * q)
    for c in _rows(tau, z, reach):
        b = c.imag
        if abs(b) < 1e-14:
            # q = 0 here, so this row is the b -> 0+ limit
            total += math.pi / math.tan(math.pi * c.real) + 1j * math.pi
            continue
        sgn = 1.0 if b > 0 else -1.0
        # pi cot(pi c) + i pi sign(b), written with the decaying exponential
        e = cmath.exp(2j * math.pi * c * sgn)
        total += -2j * math.pi * sgn * e / (1 - e)
    return 1j / (2 * math.pi) * total


def e2_fourier(tau: complex, z: complex, reach: int = 40) -> complex:
    y = tau.imag
    q = z.imag / y - math.floor(z.imag / y)
    total = -(q * q - q + 1 / 6) / 2
    on_lattice = False
    for c in _rows(tau, z, reach):
        b = c.imag
        if abs(b) < 1e-14:
            frac = c.real - math.floor(c.real)
            if min(frac, 1 - frac) < 1e-14:
                on_lattice = True
            continue
        e = cmath.exp(2j * math.pi * c) if b > 0 else cmath.exp(-2j * math.pi * c)
        total += abs(b) / y * e / (1 - e)
    if on_lattice:
        total += 1 / (4 * math.pi * y)
    return complex(total)


def _row_sum(s, alpha, beta, kmax):
    """sum_m ((m + alpha)^2 + beta^2)^(-s), beta != 0, Bessel tail only."""
    beta = abs(beta)
    out = mp.mpf(0)
    for k in range(1, kmax + 1):
        arg = 2 * mp.pi * k * beta
        if arg > 60:
            break
        out += k ** (s - mp.mpf(1) / 2) * mp.cos(2 * mp.pi * k * alpha) * mp.besselk(s - mp.mpf(1) / 2, arg)
    return 4 * mp.pi ** s * mp.rgamma(s) * beta ** (mp.mpf(1) / 2 - s) * out


def k0_rows(s, tau, re_z, im_z, kmax=60):
    """K_0(s, tau, z, 0) for Im z / y not an integer (no row through the lattice)."""
    s = mp.mpc(s)
    x, y = mp.mpf(tau.real), mp.mpf(tau.imag)
    t = im_z / y
    frac = t - mp.floor(t)
    main = mp.sqrt(mp.pi) * mp.gamma(s - mp.mpf(1) / 2) * mp.rgamma(s) * y ** (1 - 2 * s)
    main *= mp.zeta(2 * s - 1, frac) + mp.zeta(2 * s - 1, 1 - frac)
    tail = mp.mpf(0)
    base = int(mp.floor(-t))
    for n in range(base - 40, base + 42):
        beta = n * y + im_z
        if abs(beta) * 2 * mp.pi > 60:
            continue
        tail += _row_sum(s, n * x + re_z, beta, kmax)
    return main + tail


def k_rows(a, s, tau: complex, z: complex, dps=20) -> complex:
    """Reference K_a(s, tau, z, 0) for a in {0, 1, 2}.

    Needs Im z / Im tau not an integer, and s not in {1, 2} when a > 0.
    """
    with mp.workdps(dps):
        s = mp.mpc(s)
        zr, zi = mp.mpf(z.real), mp.mpf(z.imag)
        if a == 0:
            return complex(k0_rows(s, tau, zr, zi))
        f = lambda re_z, im_z: k0_rows(s - a, tau, re_z, im_z)  # noqa: E731
        if a == 1:
            dx = mp.diff(f, (zr, zi), (1, 0))
            dy = mp.diff(f, (zr, zi), (0, 1))
            return complex(-(dx - 1j * dy) / 2 / (s - 1))
        dxx = mp.diff(f, (zr, zi), (2, 0))
        dxy = mp.diff(f, (zr, zi), (1, 1))
        dyy = mp.diff(f, (zr, zi), (0, 2))
        return complex((dxx - 2j * dxy - dyy) / 4 / ((s - 1) * (s - 2)))


def coset_oracle(m):
    """Z^2 / M Z^2 by exhaustive scan; returns a set of canonical keys."""
    (a, b), (c, d) = m
    det = a * d - b * c
    inv = ((Fraction(d, det), Fraction(-b, det)), (Fraction(-c, det), Fraction(a, det)))
    box = abs(det)
    keys = set()
    for v in itertools.product(range(box), repeat=2):
        w = tuple((inv[i][0] * v[0] + inv[i][1] * v[1]) % 1 for i in range(2))
        keys.add(w)
    return keys


def bernoulli2(t: Fraction) -> Fraction:
    t = t - math.floor(t)
    return t * t - t + Fraction(1, 6)
