"""Numerical toolkit for the (GL2, GL2) Eisenstein theta-lift cocycle."""

from .bruhat import BruhatFactorization, bruhat_factor, factor_word
from .cm import CMContext, theta_gamma_cm
from .cocycle import (
    UNIPOTENT_LIFT,
    act,
    cocycle_defect,
    cusp_degeneration,
    first_term,
    sl2_first_term,
    theta_cycle,
    theta_gamma,
    theta_stabilized,
    theta_telescoped,
)
from .domain import Mat2, OrderElement, TorsionCoord, TorsionCycle, TorsionPoint, UpperHalfPoint
from .errors import ThetaLabError
from .hecke import delta_p_cycle, fit_kappa, hecke_modular, hecke_on_cocycle, tp_reps, verify_equivariance
from .isogeny import matrix_preimages
from .series import SeriesParams, e1, e2, k_continued, k_direct

__version__ = "0.1.0"

__all__ = [
    "BruhatFactorization", "CMContext", "Mat2", "OrderElement", "SeriesParams", "ThetaLabError",
    "TorsionCoord", "TorsionCycle", "TorsionPoint", "UNIPOTENT_LIFT", "UpperHalfPoint", "act",
    "bruhat_factor", "cocycle_defect", "cusp_degeneration", "delta_p_cycle", "e1", "e2",
    "factor_word", "first_term", "fit_kappa", "hecke_modular", "hecke_on_cocycle", "k_continued",
    "k_direct", "matrix_preimages", "sl2_first_term", "theta_cycle", "theta_gamma",
    "theta_gamma_cm", "theta_stabilized", "theta_telescoped", "tp_reps", "verify_equivariance",
]
