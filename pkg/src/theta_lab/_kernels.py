"""Hot lattice-sum kernels.

Every kernel exists twice: a scalar-loop version compiled with ``numba.njit``
and a vectorised numpy version.  ``THETA_LAB_JIT=0`` (or numba being
unavailable) selects the numpy path; both compute the same sums term by term
and are cross-checked in the test suite.

Notation shared by the kernels (``V = Im tau`` is the covolume of
``Z + Z tau``, ``lam`` the Mellin split point)::

    phi(sigma, x) = int_1^oo t^(sigma-1) exp(-x t) dt          (x > 0)

    upper = sum_{w in z+L, w != 0} conj(w)^a chi(w-z) phi(s, pi lam |w|^2 / V)
    lower = sum_{xi in L* - mu0, xi != 0}
                (-i V conj(xi))^a exp(2 pi i Re(z conj(xi))) phi(a+1-s, pi V |xi|^2 / lam)

with ``L* = (i/V) L`` and ``mu0 = i u / V``.
"""

from __future__ import annotations

import math
import os

import numpy as np

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(16)

# phi switches from the continued fraction to quadrature below this argument
CF_SWITCH = 2.0
CF_MAXITER = 400
CF_EPS = 1e-16
QUAD_DECAY = 40.0


def _jit_requested() -> bool:
    flag = os.environ.get("THETA_LAB_JIT", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _jit_requested()


# ---------------------------------------------------------------------------
# scalar-loop kernels (compiled by numba when enabled)


def _phi_scalar(sigma, x, glx, glw):
    if x >= CF_SWITCH:
        # Legendre continued fraction for E_n(x), n = 1 - sigma (modified Lentz)
        n = 1.0 - sigma
        b = x + n
        c = complex(1e300, 0.0)
        d = 1.0 / b
        h = d
        for i in range(1, CF_MAXITER):
            an = -i * (n - 1.0 + i)
            b = b + 2.0
            d = 1.0 / (an * d + b)
            c = b + an / c
            de = c * d
            h = h * de
            if abs(de - 1.0) < CF_EPS:
                break
        return h * math.exp(-x)
    # t = e^v turns the integrand into exp(sigma v - x e^v), entire in v
    sr = max(sigma.real, 0.0)
    vmax = math.log(QUAD_DECAY / x)
    for _ in range(8):
        vmax = math.log((sr * vmax + QUAD_DECAY) / x)
    npan = int(2.0 * vmax) + 2
    width = vmax / npan
    total = 0j
    for k in range(npan):
        left = k * width
        for j in range(glx.shape[0]):
            t = left + 0.5 * width * (glx[j] + 1.0)
            total += glw[j] * np.exp(sigma * t - x * math.exp(t))
    return total * 0.5 * width


def _upper_scalar(a, s, tau, z, uc, lam, radius, skip_m, skip_n, glx, glw):
    y = tau.imag
    xt = tau.real
    scale = math.pi * lam / y
    total = 0j
    n_lo = math.ceil((-radius - z.imag) / y)
    n_hi = math.floor((radius - z.imag) / y)
    for n in range(n_lo, n_hi + 1):
        b = n * y + z.imag
        rem = radius * radius - b * b
        if rem < 0.0:
            continue
        r = math.sqrt(rem)
        c0 = n * xt + z.real
        for m in range(math.ceil(-r - c0), math.floor(r - c0) + 1):
            if m == skip_m and n == skip_n:
                continue
            w = complex(m + c0, b)
            r2 = w.real * w.real + w.imag * w.imag
            if r2 == 0.0:
                continue
            om = complex(m + n * xt, n * y)
            # chi(omega) = exp(2 pi i Im(omega conj(u)) / y)
            ph = 2.0 * math.pi * (om.imag * uc.real - om.real * uc.imag) / y
            term = w.conjugate() ** a * complex(math.cos(ph), math.sin(ph))
            total += term * _phi(s, scale * r2, glx, glw)
    return total


def _lower_scalar(a, s, tau, z, uc, lam, radius, skip_p, skip_q, glx, glw):
    y = tau.imag
    xt = tau.real
    mu0 = 1j * uc / y
    scale = math.pi * y / lam
    sigma = a + 1.0 - s
    total = 0j
    q_lo = math.ceil(-radius - mu0.real)
    q_hi = math.floor(radius - mu0.real)
    for q in range(q_lo, q_hi + 1):
        re = -q - mu0.real
        rem = radius * radius - re * re
        if rem < 0.0:
            continue
        r = math.sqrt(rem)
        p_lo = math.ceil(y * (mu0.imag - r) - q * xt)
        p_hi = math.floor(y * (mu0.imag + r) - q * xt)
        for p in range(p_lo, p_hi + 1):
            if p == skip_p and q == skip_q:
                continue
            xi = complex(re, (p + q * xt) / y - mu0.imag)
            r2 = xi.real * xi.real + xi.imag * xi.imag
            if r2 == 0.0:
                continue
            ph = 2.0 * math.pi * (z.real * xi.real + z.imag * xi.imag)
            term = (-1j * y * xi.conjugate()) ** a * complex(math.cos(ph), math.sin(ph))
            total += term * _phi(sigma, scale * r2, glx, glw)
    return total


def _direct_scalar(a, s, tau, z, uc, r_in, r_out, skip_m, skip_n):
    """Sum of conj(w)^a |w|^(-2s) chi over |w| <= r_out, tapered on [r_in, r_out]."""
    y = tau.imag
    xt = tau.real
    total = 0j
    n_lo = math.ceil((-r_out - z.imag) / y)
    n_hi = math.floor((r_out - z.imag) / y)
    width = r_out - r_in
    for n in range(n_lo, n_hi + 1):
        b = n * y + z.imag
        rem = r_out * r_out - b * b
        if rem < 0.0:
            continue
        r = math.sqrt(rem)
        c0 = n * xt + z.real
        for m in range(math.ceil(-r - c0), math.floor(r - c0) + 1):
            if m == skip_m and n == skip_n:
                continue
            w = complex(m + c0, b)
            r2 = w.real * w.real + w.imag * w.imag
            if r2 == 0.0:
                continue
            weight = 1.0
            if width > 0.0:
                rr = math.sqrt(r2)
                if rr > r_in:
                    weight = _taper((rr - r_in) / width)
                    if weight == 0.0:
                        continue
            om_re = m + n * xt
            om_im = n * y
            ph = 2.0 * math.pi * (om_im * uc.real - om_re * uc.imag) / y
            term = w.conjugate() ** a * np.exp(-s * math.log(r2))
            total += weight * term * complex(math.cos(ph), math.sin(ph))
    return total


def _taper_py(t):
    """Smooth step from 1 (t <= 0) to 0 (t >= 1), all derivatives vanishing at the ends."""
    if t <= 0.0:
        return 1.0
    if t >= 1.0:
        return 0.0
    f0 = math.exp(-1.0 / (1.0 - t))
    f1 = math.exp(-1.0 / t)
    return f0 / (f0 + f1)


# ---------------------------------------------------------------------------
# numpy kernels


def _phi_np(sigma, x):
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape, dtype=complex)
    big = x >= CF_SWITCH
    if big.any():
        xb = x[big]
        n = 1.0 - sigma
        b = xb + n
        c = np.full(xb.shape, 1e300 + 0j)
        d = 1.0 / b
        h = d.copy()
        live = np.ones(xb.shape, dtype=bool)
        for i in range(1, CF_MAXITER):
            an = -i * (n - 1.0 + i)
            b = b + 2.0
            d = np.where(live, 1.0 / (an * d + b), d)
            c = np.where(live, b + an / c, c)
            de = np.where(live, c * d, 1.0)
            h = h * de
            live &= np.abs(de - 1.0) >= CF_EPS
            if not live.any():
                break
        out[big] = h * np.exp(-xb)
    small = ~big
    if small.any():
        out[small] = [_phi_quad_np(sigma, xv) for xv in x[small]]
    return out


def _phi_quad_np(sigma, x):
    sr = max(sigma.real, 0.0)
    vmax = math.log(QUAD_DECAY / x)
    for _ in range(8):
        vmax = math.log((sr * vmax + QUAD_DECAY) / x)
    npan = int(2.0 * vmax) + 2
    width = vmax / npan
    left = np.arange(npan)[:, None] * width
    t = left + 0.5 * width * (GL_NODES[None, :] + 1.0)
    vals = np.exp(sigma * t - x * np.exp(t)) * GL_WEIGHTS[None, :]
    return vals.sum() * 0.5 * width


def _disk_indices(radius, lead, shift, y, xt):
    """Integer pairs ``(i, k)`` with ``|i + k*xt + shift_re + i*(k*y + shift_im)|`` inside the disk.

    ``lead`` selects the enumeration orientation of the upper sum.
    """
    k_lo = math.ceil((-radius - shift.imag) / y)
    k_hi = math.floor((radius - shift.imag) / y)
    if k_hi < k_lo:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    ks = np.arange(k_lo, k_hi + 1)
    b = ks * y + shift.imag
    r = np.sqrt(np.maximum(radius * radius - b * b, 0.0))
    c0 = ks * xt + shift.real
    i_lo = np.ceil(-r - c0).astype(np.int64)
    i_hi = np.floor(r - c0).astype(np.int64)
    counts = np.maximum(i_hi - i_lo + 1, 0)
    kk = np.repeat(ks, counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    ii = np.repeat(i_lo, counts) + offsets
    return ii, kk


def _upper_np(a, s, tau, z, uc, lam, radius, skip_m, skip_n):
    y, xt = tau.imag, tau.real
    m, n = _disk_indices(radius, 0, z, y, xt)
    keep = ~((m == skip_m) & (n == skip_n))
    m, n = m[keep], n[keep]
    w = (m + n * xt + z.real) + 1j * (n * y + z.imag)
    r2 = w.real ** 2 + w.imag ** 2
    nz = r2 > 0
    w, r2, m, n = w[nz], r2[nz], m[nz], n[nz]
    ph = 2.0 * math.pi * ((n * y) * uc.real - (m + n * xt) * uc.imag) / y
    terms = np.conj(w) ** a * np.exp(1j * ph) * _phi_np(s, math.pi * lam / y * r2)
    return terms.sum()


def _lower_np(a, s, tau, z, uc, lam, radius, skip_p, skip_q):
    y, xt = tau.imag, tau.real
    mu0 = 1j * uc / y
    q_lo = math.ceil(-radius - mu0.real)
    q_hi = math.floor(radius - mu0.real)
    if q_hi < q_lo:
        return 0j
    qs = np.arange(q_lo, q_hi + 1)
    re = -qs - mu0.real
    r = np.sqrt(np.maximum(radius * radius - re * re, 0.0))
    p_lo = np.ceil(y * (mu0.imag - r) - qs * xt).astype(np.int64)
    p_hi = np.floor(y * (mu0.imag + r) - qs * xt).astype(np.int64)
    counts = np.maximum(p_hi - p_lo + 1, 0)
    q = np.repeat(qs, counts)
    p = np.repeat(p_lo, counts) + np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    keep = ~((p == skip_p) & (q == skip_q))
    p, q = p[keep], q[keep]
    xi = (-q - mu0.real) + 1j * ((p + q * xt) / y - mu0.imag)
    r2 = xi.real ** 2 + xi.imag ** 2
    nz = r2 > 0
    xi, r2 = xi[nz], r2[nz]
    ph = 2.0 * math.pi * (z.real * xi.real + z.imag * xi.imag)
    terms = (-1j * y * np.conj(xi)) ** a * np.exp(1j * ph) * _phi_np(a + 1.0 - s, math.pi * y / lam * r2)
    return terms.sum()


def _taper_np(t):
    t = np.clip(t, 0.0, 1.0)
    out = np.zeros_like(t)
    out[t <= 0.0] = 1.0
    mid = (t > 0.0) & (t < 1.0)
    tm = t[mid]
    f0 = np.exp(-1.0 / (1.0 - tm))
    f1 = np.exp(-1.0 / tm)
    out[mid] = f0 / (f0 + f1)
    return out


def _direct_np(a, s, tau, z, uc, r_in, r_out, skip_m, skip_n, chunk=2_000_000):
    y, xt = tau.imag, tau.real
    m_all, n_all = _disk_indices(r_out, 0, z, y, xt)
    total = 0j
    for start in range(0, m_all.size, chunk):
        m = m_all[start:start + chunk]
        n = n_all[start:start + chunk]
        keep = ~((m == skip_m) & (n == skip_n))
        m, n = m[keep], n[keep]
        w = (m + n * xt + z.real) + 1j * (n * y + z.imag)
        r2 = w.real ** 2 + w.imag ** 2
        nz = r2 > 0
        w, r2, m, n = w[nz], r2[nz], m[nz], n[nz]
        weight = np.ones(r2.shape)
        if r_out > r_in:
            weight = _taper_np((np.sqrt(r2) - r_in) / (r_out - r_in))
        ph = 2.0 * math.pi * ((n * y) * uc.real - (m + n * xt) * uc.imag) / y
        total += (weight * np.conj(w) ** a * np.exp(-s * np.log(r2)) * np.exp(1j * ph)).sum()
    return total


# ---------------------------------------------------------------------------
# dispatch

if HAVE_NUMBA:
    _jit = numba.njit(cache=True, fastmath=False)
    _phi_jit = _jit(_phi_scalar)
    # the loop kernels resolve _phi/_taper as globals at compile time
    _phi = _phi_jit
    _taper = _jit(_taper_py)
    _upper_jit = _jit(_upper_scalar)
    _lower_jit = _jit(_lower_scalar)
    _direct_jit = _jit(_direct_scalar)
else:  # pragma: no cover
    _phi = _phi_scalar
    _taper = _taper_py


def phi(sigma: complex, x, use_numba: bool | None = None):
    """Upper incomplete-gamma kernel ``int_1^oo t^(sigma-1) e^(-x t) dt`` for ``x > 0``."""
    use = USE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA)
    sigma = complex(sigma)
    if np.ndim(x) == 0:
        if use:
            return complex(_phi_jit(sigma, float(x), GL_NODES, GL_WEIGHTS))
        return complex(_phi_np(sigma, np.array([float(x)]))[0])
    return _phi_np(sigma, np.asarray(x, dtype=float)) if not use else np.array(
        [_phi_jit(sigma, float(v), GL_NODES, GL_WEIGHTS) for v in np.ravel(x)]
    ).reshape(np.shape(x))


def mellin_sums(a, s, tau, z, uc, lam, r_up, r_lo, skip_up, skip_lo, use_numba=None):
    """``(upper, lower)`` raw sums; ``skip_*`` are excluded index pairs or ``None``."""
    use = USE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA)
    big = 1 << 62
    sm, sn = skip_up if skip_up is not None else (big, big)
    sp, sq = skip_lo if skip_lo is not None else (big, big)
    args = (int(a), complex(s), complex(tau), complex(z), complex(uc), float(lam))
    if use:
        up = _upper_jit(*args, float(r_up), sm, sn, GL_NODES, GL_WEIGHTS)
        lo = _lower_jit(*args, float(r_lo), sp, sq, GL_NODES, GL_WEIGHTS)
    else:
        up = _upper_np(*args, float(r_up), sm, sn)
        lo = _lower_np(*args, float(r_lo), sp, sq)
    return complex(up), complex(lo)


def direct_sum(a, s, tau, z, uc, r_in, r_out, skip, use_numba=None):
    use = USE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA)
    big = 1 << 62
    sm, sn = skip if skip is not None else (big, big)
    args = (int(a), complex(s), complex(tau), complex(z), complex(uc), float(r_in), float(r_out), sm, sn)
    if use:
        return complex(_direct_jit(*args))
    return complex(_direct_np(*args))
