"""Seeded property suites behind ``theta-lab verify``."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .cm import CMContext, theta_gamma_cm
from .cocycle import act, cocycle_defect, cusp_degeneration, theta_gamma, theta_telescoped
from .domain import Mat2, TorsionCoord, TorsionPoint
from .errors import SingularEvaluation, SingularMatrix
from .hecke import EquivarianceReport, fit_kappa, verify_equivariance
from .series import SeriesParams, e1, e2

DEFAULT_SUITE_TOL = {
    "parity": 1e-8,
    "distribution": 1e-7,
    "dbar": 1e-5,
    "cocycle": 1e-6,
    "modularity": 1e-6,
    "hecke": 1e-4,
    "cusp": 1e-3,
    "cm": 1e-6,
}

HECKE_GAMMAS = (Mat2(1, 1, 0, 1), Mat2(1, 0, 5, 1), Mat2(11, 2, 5, 1))
HECKE_TAUS = (0.3 + 1.1j, 1j)
CUSP_LADDER = (20.0, 50.0, 100.0)
CUSP_MATRICES = (Mat2(1, 1, 1, 2), Mat2(2, 1, 3, 2))
CUSP_POINTS = (
    TorsionPoint.of(0, Fraction(1, 3), 0, Fraction(1, 5)),
    TorsionPoint.of(Fraction(1, 4), Fraction(1, 7), Fraction(1, 2), Fraction(3, 11)),
)


@dataclass
class SuiteResult:
    suite: str
    tol: float
    errors: List[float] = field(default_factory=list)
    kappa: Optional[complex] = None
    notes: Dict[str, object] = field(default_factory=dict)

    def record(self, err: float) -> None:
        self.errors.append(float(err))

    @property
    def cases(self) -> int:
        return len(self.errors)

    @property
    def failures(self) -> int:
        return sum(1 for e in self.errors if not e < self.tol)

    @property
    def worst_error(self) -> float:
        return max(self.errors, default=0.0)

    @property
    def passed(self) -> bool:
        return self.cases > 0 and self.failures == 0


# ---------------------------------------------------------------------------
# random inputs


def random_tau(rng: np.random.Generator) -> complex:
    return complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 2.0))


def random_coord(rng: np.random.Generator, max_den: int = 9) -> TorsionCoord:
    while True:
        den = int(rng.integers(2, max_den + 1))
        c = TorsionCoord(Fraction(int(rng.integers(0, den)), den), Fraction(int(rng.integers(0, den)), den))
        if not c.is_zero():
            return c


def random_point(rng: np.random.Generator, max_den: int = 7) -> TorsionPoint:
    return TorsionPoint(random_coord(rng, max_den), random_coord(rng, max_den))


def random_matrix(rng: np.random.Generator, bound: int = 3, max_det: int = 6) -> Mat2:
    while True:
        a, b, c, d = (int(v) for v in rng.integers(-bound, bound + 1, size=4))
        det = a * d - b * c
        if det != 0 and abs(det) <= max_det:
            return Mat2(a, b, c, d)


S_GEN = Mat2(0, -1, 1, 0)


def random_sl2_word(rng: np.random.Generator, length: int = 4) -> List[Mat2]:
    word = []
    for _ in range(length):
        k = int(rng.integers(-2, 3)) or 1
        word.extend([Mat2(1, k, 0, 1), S_GEN])
    return word


def _retry(rng, fn: Callable, attempts: int = 50):
    """Re-draw inputs that land on an E1 pole stratum."""
    for _ in range(attempts):
        try:
            return fn(rng)
        except SingularEvaluation:
            continue
    raise SingularEvaluation("no admissible sample found")


# ---------------------------------------------------------------------------
# suites


def suite_parity(rng, tol, n=100, params=None) -> SuiteResult:
    res = SuiteResult("parity", tol)
    for _ in range(n):
        tau = random_tau(rng)
        z = complex(rng.uniform(0, 1), 0) - tau * rng.uniform(0, 1)
        res.record(abs(e1(tau, z, params) + e1(tau, -z, params)))
        res.record(abs(e2(tau, z, params) - e2(tau, -z, params)))
    tau = random_tau(rng)
    res.record(abs(e1(tau, TorsionCoord(0, 0), params)))
    for half in ((Fraction(1, 2), 0), (0, Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 2))):
        res.record(abs(e1(tau, TorsionCoord(*half), params)))
    return res


def suite_distribution(rng, tol, n=20, params=None) -> SuiteResult:
    res = SuiteResult("distribution", tol)
    for a in (2, 3):
        for _ in range(n):
            tau = random_tau(rng)
            z = random_coord(rng)
            pre = [TorsionCoord((z.u + j) / a, (z.v + k) / a) for j in range(a) for k in range(a)]
            res.record(abs(sum(e1(tau, w, params) for w in pre) - a * e1(tau, z, params)))
            res.record(abs(sum(e2(tau, w, params) for w in pre) - e2(tau, z, params)))
    return res


def dbar(f: Callable[[complex], complex], z: complex, h: float = 1e-4) -> complex:
    """Central-difference ``d/dzbar = (d/dx + i d/dy) / 2``."""
    fx = (f(z + h) - f(z - h)) / (2 * h)
    fy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    return 0.5 * (fx + 1j * fy)


def suite_dbar(rng, tol, n=20, params=None) -> SuiteResult:
    res = SuiteResult("dbar", tol)
    tau = random_tau(rng)
    y = tau.imag
    for _ in range(n):
        z = complex(rng.uniform(0.1, 0.9), 0) - tau * rng.uniform(0.1, 0.9)
        d2 = dbar(lambda w: e2(tau, w, params), z)
        res.record(abs(d2 - 1j / (2 * y) * e1(tau, z, params)))
    slopes = []
    for _ in range(5):
        z = complex(rng.uniform(0.1, 0.9), 0) - tau * rng.uniform(0.1, 0.9)
        slopes.append(dbar(lambda w: e1(tau, w, params), z))
    mean = sum(slopes) / len(slopes)
    for s in slopes:
        res.record(abs(s - mean))
    res.notes["dbar_e1_times_y"] = mean * y
    return res


def suite_cocycle(rng, tol, n=100, params=None, words=100) -> SuiteResult:
    res = SuiteResult("cocycle", tol)
    for _ in range(n):
        def case(r):
            return abs(cocycle_defect(random_tau(r), random_matrix(r), random_matrix(r), random_point(r), params))

        res.record(_retry(rng, case))
    for _ in range(words):
        def word_case(r):
            tau, word, x = random_tau(r), random_sl2_word(r), random_point(r)
            g = Mat2(1, 0, 0, 1)
            for m in word:
                g = g @ m
            return abs(theta_gamma(tau, g, x, params) - theta_telescoped(tau, word, x, params))

        res.record(_retry(rng, word_case))
    return res


def random_gamma_n(rng, level: int, length: int = 3) -> Mat2:
    g = Mat2(1, 0, 0, 1)
    for _ in range(length):
        k = int(rng.integers(-1, 2)) or 1
        g = g @ (Mat2(1, k * level, 0, 1) if rng.random() < 0.5 else Mat2(1, 0, k * level, 1))
    return g


def modularity_error(tau: complex, h: Mat2, g: Mat2, x: TorsionPoint, params=None) -> float:
    a, b, c, d = (float(v) for v in h.entries())
    j = c * tau + d
    moved = theta_gamma((a * tau + b) / j, g, x, params) / j ** 2
    return abs(moved - theta_gamma(tau, g, x, params))


def suite_modularity(rng, tol, n=5, params=None, level=5) -> SuiteResult:
    """Full level-N substitutions fix every N-torsion coordinate."""
    res = SuiteResult("modularity", tol)
    for _ in range(n):
        def case(r):
            tau = random_tau(r)
            x = TorsionPoint(*(TorsionCoord(Fraction(int(r.integers(0, level)), level), Fraction(int(r.integers(1, level)), level)) for _ in range(2)))
            g = random_matrix(r, 2, 1)
            return modularity_error(tau, random_gamma_n(r, level), g, x, params)

        res.record(_retry(rng, case))
    return res


def suite_hecke(rng, tol, p_values=(2, 3), level=5, params=None) -> SuiteResult:
    res = SuiteResult("hecke", tol)
    reports: List[Tuple[int, EquivarianceReport]] = []
    for p in p_values:
        for g in HECKE_GAMMAS:
            for tau in HECKE_TAUS:
                reports.append((p, verify_equivariance(p, level, tau, g, params=params)))
    kappa, _ = fit_kappa(r for _, r in reports)
    for _, r in reports:
        res.record(r.residual(kappa))
    res.kappa = kappa
    res.notes["reports"] = [(p, r.lhs, r.rhs) for p, r in reports]
    return res


def suite_cusp(rng, tol, params=None) -> SuiteResult:
    """Ratios along ``iy`` must settle, and settle on one constant."""
    res = SuiteResult("cusp", tol)
    limits = []
    for g in CUSP_MATRICES:
        for x in CUSP_POINTS:
            rep = cusp_degeneration(g, x, CUSP_LADDER, params, tol=tol)
            for r1, r2 in zip(rep.ratios, rep.ratios[1:]):
                res.record(abs(r2 - r1))
            limits.append(rep.limit)
    for lim in limits:
        res.record(abs(lim - limits[0]))
    res.notes["limit"] = limits[0]
    return res


def suite_cm(rng, tol, n=50, params=None) -> SuiteResult:
    res = SuiteResult("cm", tol)
    ctx = CMContext.of(0, -1)
    for _ in range(5):
        def restrict(r):
            g, x = random_matrix(r), random_point(r)
            return abs(theta_gamma_cm(ctx, ctx.lift(g), x, params) - theta_gamma(ctx.tau.tau, g, x, params))

        res.record(_retry(rng, restrict))

    def gaussian(r):
        while True:
            try:
                g = Mat2(*(ctx.element(int(r.integers(-2, 3)), int(r.integers(-2, 3))) for _ in range(4)))
            except SingularMatrix:
                continue
            n_det = abs(g.det.norm())
            if n_det != 0 and n_det <= 10:
                return g

    for _ in range(n):
        def case(r):
            g2, g1, x = gaussian(r), gaussian(r), random_point(r, 5)
            lhs = theta_gamma_cm(ctx, g2 @ g1, x, params)
            rhs = act(ctx.tau, g2, lambda q: theta_gamma_cm(ctx, g1, q, params))(x) + theta_gamma_cm(ctx, g2, x, params)
            return abs(lhs - rhs)

        res.record(_retry(rng, case))
    return res


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "parity": suite_parity,
    "distribution": suite_distribution,
    "dbar": suite_dbar,
    "cocycle": suite_cocycle,
    "modularity": suite_modularity,
    "hecke": suite_hecke,
    "cusp": suite_cusp,
    "cm": suite_cm,
}


def run_suite(name: str, seed: int = 0, tol: Optional[float] = None, params: Optional[SeriesParams] = None, **kwargs) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    rng = np.random.default_rng(seed)
    return SUITES[name](rng, DEFAULT_SUITE_TOL[name] if tol is None else tol, params=params, **kwargs)
