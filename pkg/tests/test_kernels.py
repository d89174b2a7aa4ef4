import numpy as np
import pytest

from theta_lab import _kernels as K


@pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba unavailable")
@pytest.mark.parametrize("a,s", [(0, 1.3), (1, 1.0), (2, 0.4 + 0.3j)])
def test_numba_and_numpy_mellin_agree(a, s):
    args = (a, s, 0.2 + 1.1j, 0.31 - 0.4j, 0.1 + 0j, 1.0, 10.0, 10.0, None, None)
    up_nb, lo_nb = K.mellin_sums(*args, use_numba=True)
    up_np, lo_np = K.mellin_sums(*args, use_numba=False)
    assert abs(up_nb - up_np) < 1e-13 * max(1, abs(up_np))
    assert abs(lo_nb - lo_np) < 1e-13 * max(1, abs(lo_np))


@pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba unavailable")
def test_numba_and_numpy_direct_agree():
    args = (1, 3.0, 0.2 + 1.1j, 0.31 - 0.4j, 0j, 20.0, 40.0, None)
    assert abs(K.direct_sum(*args, use_numba=True) - K.direct_sum(*args, use_numba=False)) < 1e-12


def test_phi_against_mpmath_expint():
    mp = pytest.importorskip("mpmath")
    xs = np.array([0.05, 0.7, 1.99, 2.01, 5.0, 12.0])
    for sigma in (1.5, -0.5 + 0.7j, 3.0):
        got = K.phi(sigma, xs, use_numba=False)
        for x, g in zip(xs, got):
            ref = complex(mp.expint(1 - sigma, x))  # phi_sigma(x) = int_1^inf t^(sigma-1) e^(-xt) dt
            assert abs(g - ref) < 1e-12 * max(1, abs(ref))


def test_env_flag_disables_jit(monkeypatch):
    monkeypatch.setenv("THETA_LAB_JIT", "0")
    assert K._jit_requested() is False
    monkeypatch.setenv("THETA_LAB_JIT", "1")
    assert K._jit_requested() is True
