"""One test per acceptance criterion; each prints a PASS/FAIL line with its numbers."""

import time
from fractions import Fraction

import numpy as np
import pytest

from theta_lab.bruhat import bruhat_factor
from theta_lab.cm import CMContext, theta_gamma_cm
from theta_lab.cocycle import act, first_term, orbit_cycle, sl2_first_term, theta_gamma
from theta_lab.domain import Mat2, TorsionPoint
from theta_lab.series import k_continued, k_direct
from theta_lab.verify import random_matrix, random_point, run_suite, _retry

# pinned tolerances
TOL_SERIES = 1e-8
TOL_PARITY = 1e-8
TOL_DISTRIBUTION = 1e-7
TOL_DBAR = 1e-5
TOL_COCYCLE = 1e-6
TOL_SL2 = 1e-6
TOL_HECKE = 1e-4
TOL_CUSP = 1e-3
TOL_CM_RESTRICT = 1e-7
TOL_CM = 1e-6
TOL_MODULAR = 1e-6
SERIES_BUDGET_S = 30.0
COCYCLE_BUDGET_S = 300.0


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return emit


def test_c01_series_consistency(report):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(50):
        a = i % 3
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 1.6))
        z = complex(rng.uniform(0.05, 0.95), 0) - tau * rng.uniform(0.05, 0.95)
        s = complex(rng.uniform(2.5, 4.0), rng.uniform(-1.0, 1.0))
        ref = k_direct(a, s, tau, z)
        worst = max(worst, abs(k_continued(a, s, tau, z) - ref) / max(1.0, abs(ref)))
    elapsed = time.perf_counter() - t0
    ok = worst < TOL_SERIES and elapsed < SERIES_BUDGET_S
    assert report(1, ok, f"worst rel err {worst:.2e} < {TOL_SERIES:g}, {elapsed:.1f}s < {SERIES_BUDGET_S:g}s")


def test_c02_parity_and_zero(report):
    res = run_suite("parity", seed=202, tol=TOL_PARITY)
    ok = res.passed and res.cases == 204
    assert report(2, ok, f"{res.cases} checks, worst {res.worst_error:.2e} < {TOL_PARITY:g}")


def test_c03_distribution(report):
    res = run_suite("distribution", seed=303, tol=TOL_DISTRIBUTION)
    ok = res.passed and res.cases == 80
    assert report(3, ok, f"{res.cases} checks, worst {res.worst_error:.2e} < {TOL_DISTRIBUTION:g}")


def test_c04_differential(report):
    res = run_suite("dbar", seed=404, tol=TOL_DBAR)
    ok = res.passed and res.cases == 25
    slope = res.notes["dbar_e1_times_y"]
    assert report(4, ok, f"worst {res.worst_error:.2e} < {TOL_DBAR:g}, y*dbar(E1) = {slope:.6f}")


def test_c05_bruhat_exact(report):
    rng = np.random.default_rng(505)
    bad = 0
    for _ in range(1000):
        while True:
            e = [Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 10))) for _ in range(4)]
            if e[0] * e[3] != e[1] * e[2]:
                g = Mat2(*e)
                break
        bad += bruhat_factor(g).product() != g
    assert report(5, bad == 0, f"{bad} mismatches in 1000 exact reconstructions")


def test_c06_cocycle(report):
    t0 = time.perf_counter()
    res = run_suite("cocycle", seed=606, tol=TOL_COCYCLE)
    elapsed = time.perf_counter() - t0
    ok = res.passed and res.cases == 200 and elapsed < COCYCLE_BUDGET_S
    assert report(6, ok, f"{res.cases} checks, worst {res.worst_error:.2e} < {TOL_COCYCLE:g}, {elapsed:.1f}s")


SL2_MATRICES = (Mat2(2, 1, 3, 2), Mat2(1, 1, 1, 2), Mat2(3, 2, 4, 3), Mat2(2, 3, 1, 2), Mat2(1, -1, 1, 0))


def test_c07_sl2_simplification(report):
    rng = np.random.default_rng(707)
    tau = 0.21 + 1.07j
    worst, cycles = 0.0, 0
    while cycles < 10:
        g = SL2_MATRICES[cycles % len(SL2_MATRICES)]
        seed = random_point(rng, 6)
        try:
            cyc = orbit_cycle(g, seed)
            err = abs(first_term(tau, g, cyc) - sl2_first_term(tau, g, cyc))
        except ArithmeticError:
            continue
        worst = max(worst, err)
        cycles += 1
    assert report(7, worst < TOL_SL2, f"10 stabilized cycles, worst {worst:.2e} < {TOL_SL2:g}")


def test_c08_hecke_equivariance(report):
    res = run_suite("hecke", tol=TOL_HECKE)
    kappa = res.kappa
    ok = res.passed and res.cases == 12
    assert report(8, ok, f"kappa = {kappa:.6f} (|kappa| {abs(kappa):.4f}), worst residual {res.worst_error:.3e} vs {TOL_HECKE:g}")


def test_c09_cusp(report):
    res = run_suite("cusp", tol=TOL_CUSP)
    ok = res.passed
    assert report(9, ok, f"ratio spread {res.worst_error:.2e} < {TOL_CUSP:g}, limit {res.notes['limit']:.6f}")


def test_c10_cm(report):
    rng = np.random.default_rng(1010)
    ctx = CMContext.of(0, -1)
    worst_restrict = 0.0
    for _ in range(50):
        def restrict(r):
            g, x = random_matrix(r), random_point(r)
            return abs(theta_gamma_cm(ctx, ctx.lift(g), x) - theta_gamma(ctx.tau.tau, g, x))

        worst_restrict = max(worst_restrict, _retry(rng, restrict))
    res = run_suite("cm", seed=1011, tol=TOL_CM)
    ok = worst_restrict < TOL_CM_RESTRICT and res.passed and res.cases == 55
    assert report(10, ok, f"restriction {worst_restrict:.2e} < {TOL_CM_RESTRICT:g}, identity worst {res.worst_error:.2e} < {TOL_CM:g}")


def test_c11_modularity(report):
    res = run_suite("modularity", seed=1111, tol=TOL_MODULAR)
    ok = res.passed and res.cases == 5
    assert report(11, ok, f"5 substitutions, worst {res.worst_error:.2e} < {TOL_MODULAR:g}")
