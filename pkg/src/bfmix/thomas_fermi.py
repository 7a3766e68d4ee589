"""Semiclassical density profiles of the trapped mixture.

The condensate is an inverted parabola fixed by its normalization; the
fermions fill the bare trap plus the mean-field shift g_bf n_b(r) up to a
Fermi energy fixed by their own normalization.  The shape of the combined
potential inside the condensate decides whether the fermions concentrate
at the trap center, spread evenly, or get pushed to the condensate edge.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .constants import hbar, pi
from .errors import DomainError, NumericError

__all__ = [
    "TFRegime", "TFProfiles", "tf_boson_profile", "tf_fermion_profile",
    "classify_tf_regime", "tf_profiles",
]


class TFRegime(enum.Enum):
    CORE = "core"
    FLAT = "flat"
    SHELL = "shell"


@dataclass(frozen=True, eq=False)
class TFProfiles:
    radii: np.ndarray
    n_b: np.ndarray
    n_f: np.ndarray
    mu_b: float
    e_F: float
    R_b: float
    regime: TFRegime


def _require_repulsive_bosons(cfg):
    if cfg.g_bb <= 0.0:
        raise DomainError(
            "interaction.g_bb must be > 0: the semiclassical condensate "
            "profile exists only for a repulsive Bose gas")


def boson_chemical_potential(cfg):
    """mu_b = (hbar omega_b / 2) (15 N_b a_bb / a)^(2/5), the inverted
    parabola's normalization in closed form."""
    _require_repulsive_bosons(cfg)
    a_bb = cfg.m_b * cfg.g_bb / (4.0 * pi * hbar ** 2)
    return 0.5 * hbar * cfg.omega_b \
        * (15.0 * cfg.N_b * a_bb / cfg.osc_length) ** 0.4


def condensate_radius(cfg):
    mu_b = boson_chemical_potential(cfg)
    return math.sqrt(2.0 * mu_b / (cfg.m_b * cfg.omega_b ** 2))


def tf_boson_profile(cfg, grid):
    """Condensate density on the given radial grid; returns (mu_b, n_b)."""
    mu_b = boson_chemical_potential(cfg)
    grid = np.asarray(grid, dtype=float)
    n_b = np.maximum(
        0.0, (mu_b - 0.5 * cfg.m_b * cfg.omega_b ** 2 * grid ** 2)
        / cfg.g_bb)
    return mu_b, n_b


def tf_fermion_profile(cfg, mu_b, n_b, grid):
    """Fermion density on the grid for the potential trap + g_bf n_b(r);
    returns (e_F, n_f) with e_F fixed by the normalization to N_f."""
    grid = np.asarray(grid, dtype=float)
    V_eff = 0.5 * cfg.m_f * cfg.omega_f ** 2 * grid ** 2 + cfg.g_bf * n_b
    pref = (2.0 * cfg.m_f / hbar ** 2) ** 1.5 / (6.0 * pi ** 2)
    shell = 4.0 * pi * grid ** 2

    def count(e_F):
        dens = pref * np.maximum(0.0, e_F - V_eff) ** 1.5
        return simpson(shell * dens, x=grid)

    lo = float(V_eff.min())
    # plateau height of the mean-field shift plus the ideal-gas guess
    step = hbar * cfg.omega_f * (6.0 * cfg.N_f) ** (1.0 / 3.0) \
        + max(0.0, cfg.g_bf * mu_b / cfg.g_bb) + hbar * cfg.omega_f
    hi = lo + step
    for _ in range(80):
        if count(hi) >= cfg.N_f:
            break
        step *= 2.0
        hi = lo + step
    else:
        raise NumericError(
            "fermion normalization bracket failed to capture N_f; the "
            "grid span may not cover the cloud")

    while hi - lo > 1e-10 * max(abs(hi), abs(lo)):
        mid = 0.5 * (lo + hi)
        if count(mid) < cfg.N_f:
            lo = mid
        else:
            hi = mid
    e_F = 0.5 * (lo + hi)
    return e_F, pref * np.maximum(0.0, e_F - V_eff) ** 1.5


def classify_tf_regime(cfg):
    """Sign of g_bf/g_bb - m_f omega_f^2 / (m_b omega_b^2) decides the
    fermion arrangement inside the condensate."""
    _require_repulsive_bosons(cfg)
    coupling_ratio = cfg.g_bf / cfg.g_bb
    trap_ratio = cfg.m_f * cfg.omega_f ** 2 / (cfg.m_b * cfg.omega_b ** 2)
    if abs(coupling_ratio - trap_ratio) \
            <= 1e-12 * max(abs(coupling_ratio), trap_ratio):
        return TFRegime.FLAT
    if coupling_ratio > trap_ratio:
        return TFRegime.SHELL
    return TFRegime.CORE


def _build_grid(cfg, mu_b, span_factor, n_points):
    # R_b is snapped onto an even-index node so the kink of both density
    # profiles falls on a quadrature panel boundary
    R_b = math.sqrt(2.0 * mu_b / (cfg.m_b * cfg.omega_b ** 2))
    e_guess = hbar * cfg.omega_f * (6.0 * cfg.N_f) ** (1.0 / 3.0) \
        + max(0.0, cfg.g_bf * mu_b / cfg.g_bb)
    R_f = math.sqrt(2.0 * e_guess / (cfg.m_f * cfg.omega_f ** 2))
    span = span_factor * max(R_b, R_f)
    j = int(round(R_b / (span / (n_points - 1))))
    j = max(2, j + (j % 2))
    h = R_b / j
    return h * np.arange(n_points), R_b


def tf_profiles(cfg, n_points=2000):
    """Both density profiles on a shared grid, plus the regime label.

    The grid spans 1.5x the larger estimated cloud radius and is widened
    when the fermion density has not decayed at the outer edge.
    """
    mu_b = boson_chemical_potential(cfg)
    span_factor = 1.5
    for _ in range(8):
        grid, R_b = _build_grid(cfg, mu_b, span_factor, n_points)
        _, n_b = tf_boson_profile(cfg, grid)
        e_F, n_f = tf_fermion_profile(cfg, mu_b, n_b, grid)
        if n_f[-1] <= 1e-12 * n_f.max():
            break
        span_factor *= 1.5
    else:
        raise NumericError(
            "fermion cloud still reaches the grid edge after 8 span "
            "expansions")
    return TFProfiles(radii=grid, n_b=n_b, n_f=n_f, mu_b=mu_b, e_F=e_F,
                      R_b=R_b, regime=classify_tf_regime(cfg))
