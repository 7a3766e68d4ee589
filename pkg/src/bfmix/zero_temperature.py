"""Zero-temperature variational analysis of the trapped mixture.

Boson side: a Gaussian condensate ansatz with variational frequency
omega gives

    E_b(omega) = (3/4) N_b hbar omega + (3/4) N_b hbar omega_b^2 / omega
                 + s g_bb N_b^2 (m_b omega / 2 pi hbar)^(3/2)

The stationary point omega_c (local minimum) defines the condensate
width; for attractive g_bb the minimum disappears above a critical atom
number N_b^c (collapse).

Fermion side: a displaced Thomas-Fermi-weighted Gaussian with
variational frequency Omega and center offset r_f gives

    E_f(Omega, r_f) = A hbar Omega N_f^(5/3) + (3 hbar omega_f^2 / 4 Omega) N_f
                      + (1/2) m_f omega_f^2 r_f^2 N_f
                      + g_bf kappa N_b N_f G^(3/2) e^(-G r_f^2)

with the Gaussian-overlap width G = m_f m_b omega_c Omega /
(hbar (m_f Omega + m_b omega_c)).  The sign structure of the Hessian at
(Omega_c, r_f = 0) (the product Y of its two diagonal brackets) and the
displaced root r_fc of dE_f/dr_f = 0 classify the phase.

compat_mode fixes three prefactors that differ between the two published
forms of these functionals:

                      Paper                      Derived
    boson s           1                          1/2   (Hartree factor)
    fermion A         (1/pi)(6pi^2)^(2/3)(3/5)^(3/2)   half of that
    interaction kappa pi^(3/2)                   pi^(-3/2)

Derived mode matches direct quadrature of the underlying functionals
with the same ansatz (verified in tests); Paper mode reproduces the
printed equations for figure comparison.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .config import MixtureConfig, CompatMode
from .constants import hbar
from .errors import DomainError, NumericError

__all__ = [
    "PhaseLabel", "BosonVariationalResult", "FermionVariationalResult",
    "boson_energy", "boson_energy_derivatives", "solve_omega_c",
    "critical_boson_number", "overlap_G", "overlap_G_derivatives",
    "fermion_energy", "fermion_energy_gradients", "solve_Omega_c",
    "separation_radius", "coupling_threshold", "stability_Y",
    "energy_hessian", "classify_zero_T", "alternating_minimization",
]

_A_DERIVED = (6.0 * math.pi ** 2) ** (2.0 / 3.0) * 0.6 ** 1.5 / (2.0 * math.pi)
_A_PAPER = 2.0 * _A_DERIVED
_KAPPA_PAPER = math.pi ** 1.5
_KAPPA_DERIVED = math.pi ** -1.5


def _mode_factors(cfg):
    """(s, A, kappa) prefactors for the configured compat mode."""
    if cfg.compat_mode is CompatMode.PAPER:
        return 1.0, _A_PAPER, _KAPPA_PAPER
    return 0.5, _A_DERIVED, _KAPPA_DERIVED


class PhaseLabel(enum.Enum):
    COEXISTING = "coexisting"
    SHELL_SEPARATED = "shell_separated"
    NO_MINIMUM = "no_minimum"


@dataclass(frozen=True)
class BosonVariationalResult:
    omega_c: float             # stationary variational frequency [rad/s]
    energy: float              # E_b(omega_c) [J]
    second_derivative: float   # d2 E_b / d omega^2 at omega_c
    is_local_minimum: bool
    N_b_critical: float = None  # collapse threshold, attractive g_bb only


@dataclass(frozen=True)
class FermionVariationalResult:
    Omega_c: float             # stationary fermion frequency [rad/s]
    r_fc: float                # cloud-center displacement [m]
    G: float                   # overlap width parameter [1/m^2]
    P: float                   # Omega-only energy part at Omega_c [J]
    Y: float                   # product of the two Hessian brackets
    hessian_det: float         # det of the (Omega, r_f) Hessian at (Omega_c, 0)
    phase: PhaseLabel


# ---------------------------------------------------------------------------
# boson side
# ---------------------------------------------------------------------------

def _interaction_C(cfg):
    return (cfg.m_b / (2.0 * math.pi * hbar)) ** 1.5


def boson_energy(omega, cfg):
    """Variational condensate energy E_b(omega)."""
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    s, _, _ = _mode_factors(cfg)
    N = cfg.N_b
    return (0.75 * N * hbar * (omega + cfg.omega_b ** 2 / omega)
            + s * cfg.g_bb * N * N * _interaction_C(cfg) * omega ** 1.5)


def boson_energy_derivatives(omega, cfg):
    """(E_b, dE_b/domega, d2E_b/domega2) with analytic derivatives."""
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    s, _, _ = _mode_factors(cfg)
    N = cfg.N_b
    C = _interaction_C(cfg)
    wb2 = cfg.omega_b ** 2
    E = (0.75 * N * hbar * (omega + wb2 / omega)
         + s * cfg.g_bb * N * N * C * omega ** 1.5)
    dE = (0.75 * N * hbar * (1.0 - wb2 / omega ** 2)
          + 1.5 * s * cfg.g_bb * N * N * C * math.sqrt(omega))
    d2E = (1.5 * N * hbar * wb2 / omega ** 3
           + 0.75 * s * cfg.g_bb * N * N * C / math.sqrt(omega))
    return E, dE, d2E


_BRENTQ_RTOL = 4.0 * 2.220446049250313e-16


def _expandable_bracket_root(f, omega_ref):
    """Root of f on the documented bracket policy: start at
    [1e-3, 1e3] * omega_ref, widen by one decade per side up to 10 times,
    then give up with NumericError."""
    lo, hi = 1e-3 * omega_ref, 1e3 * omega_ref
    flo, fhi = f(lo), f(hi)
    for _ in range(10):
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        if flo * fhi < 0.0:
            return brentq(f, lo, hi, xtol=1e-15 * omega_ref,
                          rtol=_BRENTQ_RTOL, maxiter=300)
        lo, hi = lo / 10.0, hi * 10.0
        flo, fhi = f(lo), f(hi)
    raise NumericError(
        "no sign change of the stationarity condition in the bracket "
        f"[{lo:.3e}, {hi:.3e}] rad/s after 10 decade expansions")


def _critical_number_closed_form(cfg):
    """Collapse threshold from the closed form: at the critical point
    omega_c = sqrt(5) omega_b and N_b^c = 2 hbar omega_b^2 /
    (s |g_bb| C omega_c^(5/2))."""
    s, _, _ = _mode_factors(cfg)
    omega_crit = math.sqrt(5.0) * cfg.omega_b
    return (2.0 * hbar * cfg.omega_b ** 2
            / (s * abs(cfg.g_bb) * _interaction_C(cfg) * omega_crit ** 2.5))


def solve_omega_c(cfg):
    """Stationary point of E_b continuously connected to omega_b.

    Repulsive g_bb: the unique root, always a minimum, below omega_b.
    Attractive g_bb: the lower root (a local minimum between omega_b and
    the inflection frequency) when it exists; otherwise the inflection
    frequency itself with is_local_minimum = False (collapsed regime).
    """
    N_crit = None
    if cfg.g_bb == 0.0:
        omega_c = cfg.omega_b
    elif cfg.g_bb > 0.0:
        omega_c = _expandable_bracket_root(
            lambda w: boson_energy_derivatives(w, cfg)[1], cfg.omega_b)
    else:
        N_crit = _critical_number_closed_form(cfg)
        s, _, _ = _mode_factors(cfg)
        C = _interaction_C(cfg)
        # inflection: d2E = 0 at omega^(5/2) = 2 hbar omega_b^2 / (s|g|N C)
        omega_infl = (2.0 * hbar * cfg.omega_b ** 2
                      / (s * abs(cfg.g_bb) * cfg.N_b * C)) ** 0.4
        slope_at_infl = boson_energy_derivatives(omega_infl, cfg)[1]
        if slope_at_infl <= 0.0:
            # slope never reaches zero from below: no stationary minimum
            E, _, d2E = boson_energy_derivatives(omega_infl, cfg)
            return BosonVariationalResult(
                omega_c=omega_infl, energy=E, second_derivative=d2E,
                is_local_minimum=False, N_b_critical=N_crit)
        # minimum root lies in (omega_b, omega_infl): slope is negative
        # at omega_b for any attractive g_bb
        omega_c = brentq(lambda w: boson_energy_derivatives(w, cfg)[1],
                         cfg.omega_b, omega_infl,
                         xtol=1e-15 * cfg.omega_b, rtol=_BRENTQ_RTOL,
                         maxiter=300)
    E, _, d2E = boson_energy_derivatives(omega_c, cfg)
    return BosonVariationalResult(
        omega_c=omega_c, energy=E, second_derivative=d2E,
        is_local_minimum=d2E > 0.0, N_b_critical=N_crit)


def critical_boson_number(cfg):
    """Largest N_b retaining a metastable minimum (attractive g_bb only),
    found by integer-resolution bisection on N_b."""
    if cfg.g_bb >= 0.0:
        raise DomainError(
            "critical_boson_number requires attractive g_bb < 0 "
            f"(got g_bb = {cfg.g_bb})")

    def has_minimum(n):
        return solve_omega_c(cfg.with_field("boson.count", float(n))
                             ).is_local_minimum

    if not has_minimum(1):
        return 1.0
    lo, hi = 1, 2
    for _ in range(60):
        if not has_minimum(hi):
            break
        lo, hi = hi, hi * 2
    else:
        raise NumericError("critical boson number exceeds 2^60; "
                           "check the coupling magnitude")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if has_minimum(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# fermion side
# ---------------------------------------------------------------------------

def overlap_G(Omega, omega_c, cfg):
    """Gaussian-overlap width G = m_f m_b omega_c Omega /
    (hbar (m_f Omega + m_b omega_c))."""
    if not (Omega > 0 and omega_c > 0):
        raise DomainError("overlap_G requires positive frequencies")
    u = cfg.m_f * Omega + cfg.m_b * omega_c
    return cfg.m_f * cfg.m_b * omega_c * Omega / (hbar * u)


def overlap_G_derivatives(Omega, omega_c, cfg):
    """(G, dG/dOmega, d2G/dOmega2), quotient-rule closed forms."""
    if not (Omega > 0 and omega_c > 0):
        raise DomainError("overlap_G requires positive frequencies")
    m_f, m_b = cfg.m_f, cfg.m_b
    u = m_f * Omega + m_b * omega_c
    G = m_f * m_b * omega_c * Omega / (hbar * u)
    dG = m_f * (m_b * omega_c) ** 2 / (hbar * u * u)
    d2G = -2.0 * m_f ** 2 * (m_b * omega_c) ** 2 / (hbar * u ** 3)
    return G, dG, d2G


def _P_part(Omega, cfg):
    _, A, _ = _mode_factors(cfg)
    N = cfg.N_f
    return (A * hbar * Omega * N ** (5.0 / 3.0)
            + 0.75 * hbar * cfg.omega_f ** 2 / Omega * N)


def fermion_energy(Omega, r_f, omega_c, cfg):
    """Variational fermion energy E_f(Omega, r_f) at condensate width
    set by omega_c."""
    if not Omega > 0:
        raise DomainError(f"Omega must be positive, got {Omega}")
    if not r_f >= 0:
        raise DomainError(f"r_f must be non-negative, got {r_f}")
    _, _, kappa = _mode_factors(cfg)
    G = overlap_G(Omega, omega_c, cfg)
    return (_P_part(Omega, cfg)
            + 0.5 * cfg.m_f * cfg.omega_f ** 2 * r_f ** 2 * cfg.N_f
            + cfg.g_bf * kappa * cfg.N_b * cfg.N_f
            * G ** 1.5 * math.exp(-G * r_f ** 2))


def fermion_energy_gradients(Omega, r_f, omega_c, cfg):
    """(dE_f/dOmega, dE_f/dr_f), analytic."""
    if not Omega > 0:
        raise DomainError(f"Omega must be positive, got {Omega}")
    if not r_f >= 0:
        raise DomainError(f"r_f must be non-negative, got {r_f}")
    _, A, kappa = _mode_factors(cfg)
    N_b, N_f = cfg.N_b, cfg.N_f
    G, dG, _ = overlap_G_derivatives(Omega, omega_c, cfg)
    damp = math.exp(-G * r_f ** 2)
    pref = cfg.g_bf * kappa * N_b * N_f
    dE_dOmega = (A * hbar * N_f ** (5.0 / 3.0)
                 - 0.75 * hbar * cfg.omega_f ** 2 / Omega ** 2 * N_f
                 + pref * damp * dG
                 * (1.5 * math.sqrt(G) - G ** 1.5 * r_f ** 2))
    dE_dr = cfg.N_f * r_f * (cfg.m_f * cfg.omega_f ** 2
                             - 2.0 * cfg.g_bf * kappa * N_b
                             * G ** 2.5 * damp)
    return dE_dOmega, dE_dr


def _hessian_brackets(Omega, omega_c, cfg):
    """The two diagonal factors of the (Omega, r_f) Hessian at r_f = 0:
    bracket1 = (2 / 3 N_f) d2E/dOmega2, bracket2 = (1 / N_f) d2E/dr_f2.
    The cross derivative vanishes at r_f = 0."""
    _, _, kappa = _mode_factors(cfg)
    G, dG, d2G = overlap_G_derivatives(Omega, omega_c, cfg)
    sqrtG = math.sqrt(G)
    bracket1 = (hbar * cfg.omega_f ** 2 / Omega ** 3
                + cfg.g_bf * kappa * cfg.N_b
                * (sqrtG * d2G + dG * dG / (2.0 * sqrtG)))
    bracket2 = (cfg.m_f * cfg.omega_f ** 2
                - 2.0 * cfg.g_bf * kappa * cfg.N_b * G ** 2.5)
    return bracket1, bracket2


def stability_Y(Omega_c, omega_c, cfg):
    """Product of the two Hessian brackets at (Omega_c, r_f = 0);
    positive means the undisplaced stationary point is a true minimum."""
    b1, b2 = _hessian_brackets(Omega_c, omega_c, cfg)
    return b1 * b2


def energy_hessian(Omega_c, omega_c, cfg):
    """(d2E/dOmega2, d2E/dr_f2, determinant) at (Omega_c, r_f = 0);
    the mixed derivative is identically zero there."""
    b1, b2 = _hessian_brackets(Omega_c, omega_c, cfg)
    d2_OO = 1.5 * cfg.N_f * b1
    d2_rr = cfg.N_f * b2
    return d2_OO, d2_rr, d2_OO * d2_rr


def solve_Omega_c(omega_c, cfg):
    """Root of dE_f/dOmega = 0 at r_f = 0; with several roots, the one
    of least energy is returned."""

    def slope(Omega):
        return fermion_energy_gradients(Omega, 0.0, omega_c, cfg)[0]

    lo, hi = 1e-3 * cfg.omega_f, 1e3 * cfg.omega_f
    for _ in range(10):
        grid = np.geomspace(lo, hi, int(round(20 * math.log10(hi / lo))) + 1)
        values = np.array([slope(w) for w in grid])
        idx = np.nonzero(np.diff(np.sign(values)) != 0)[0]
        if idx.size:
            roots = [brentq(slope, grid[i], grid[i + 1],
                            xtol=1e-15 * cfg.omega_f, rtol=_BRENTQ_RTOL,
                            maxiter=300) for i in idx]
            return min(roots,
                       key=lambda w: fermion_energy(w, 0.0, omega_c, cfg))
        lo, hi = lo / 10.0, hi * 10.0
    raise NumericError(
        "no sign change of dE_f/dOmega in the bracket "
        f"[{lo:.3e}, {hi:.3e}] rad/s after 10 decade expansions")


def coupling_threshold(Omega_c, omega_c, cfg):
    """g_bf* = m_f omega_f^2 / (2 N_b kappa G^(5/2)), the coupling at
    which r_f = 0 stops being a minimum of E_f."""
    _, _, kappa = _mode_factors(cfg)
    G = overlap_G(Omega_c, omega_c, cfg)
    return cfg.m_f * cfg.omega_f ** 2 / (2.0 * cfg.N_b * kappa * G ** 2.5)


def separation_radius(Omega_c, omega_c, cfg):
    """Displaced root of dE_f/dr_f = 0: r_fc = sqrt((1/G) ln(g_bf/g_bf*))
    for g_bf > g_bf*, else 0.  Continuous at the threshold."""
    g_star = coupling_threshold(Omega_c, omega_c, cfg)
    if cfg.g_bf <= g_star:
        return 0.0
    G = overlap_G(Omega_c, omega_c, cfg)
    return math.sqrt(math.log(cfg.g_bf / g_star) / G)


def classify_zero_T(cfg):
    """Sequential minimization (omega_c, then the reference width, then
    the r_f root) and phase assignment.

    Stability is judged at the cross-coupling-free reference width.  At
    the fully re-solved width the criterion degenerates: repulsion swells
    the cloud, G drops, and the threshold g_bf* rises ahead of g_bf, so
    the second bracket would never change sign and every configuration
    would be labelled coexisting.  Freezing the width at its g_bf = 0
    value keeps the sweep of Y and r_fc over g_bf meaningful.
    """
    boson = solve_omega_c(cfg)
    if not boson.is_local_minimum:
        raise DomainError(
            "boson energy functional has no local minimum (collapsed "
            "regime); zero-T classification is undefined")
    decoupled = cfg.with_field("interaction.g_bf", 0.0)
    Omega_c = solve_Omega_c(boson.omega_c, decoupled)
    Y = stability_Y(Omega_c, boson.omega_c, cfg)
    _, _, det = energy_hessian(Omega_c, boson.omega_c, cfg)
    r_fc = separation_radius(Omega_c, boson.omega_c, cfg)
    if r_fc > 0.0:
        phase = PhaseLabel.SHELL_SEPARATED
    elif Y > 0.0 and det > 0.0:
        phase = PhaseLabel.COEXISTING
    else:
        phase = PhaseLabel.NO_MINIMUM
    return FermionVariationalResult(
        Omega_c=Omega_c, r_fc=r_fc,
        G=overlap_G(Omega_c, boson.omega_c, cfg),
        P=_P_part(Omega_c, cfg), Y=Y, hessian_det=det, phase=phase)


def alternating_minimization(cfg, max_iter=200, rtol=1e-12):
    """Joint (Omega, r_f) minimization by coordinate descent; returns
    (Omega, r_f, E_f).  Cross-check utility for the sequential solver."""
    boson = solve_omega_c(cfg)
    if not boson.is_local_minimum:
        raise DomainError("boson side has no minimum; nothing to refine")
    omega_c = boson.omega_c
    _, _, kappa = _mode_factors(cfg)
    r_f = 0.0
    Omega = solve_Omega_c(omega_c, cfg)
    for _ in range(max_iter):
        # best r_f at fixed Omega: r = 0 or the displaced root
        G = overlap_G(Omega, omega_c, cfg)
        r_candidates = [0.0]
        if cfg.g_bf > 0.0:
            arg = (2.0 * cfg.g_bf * kappa * cfg.N_b * G ** 2.5
                   / (cfg.m_f * cfg.omega_f ** 2))
            if arg > 1.0:
                r_candidates.append(math.sqrt(math.log(arg) / G))
        r_new = min(r_candidates,
                    key=lambda r: fermion_energy(Omega, r, omega_c, cfg))

        # best Omega at fixed r_f
        def slope(w, r=r_new):
            return fermion_energy_gradients(w, r, omega_c, cfg)[0]

        grid = np.geomspace(1e-3 * cfg.omega_f, 1e3 * cfg.omega_f, 121)
        values = np.array([slope(w) for w in grid])
        idx = np.nonzero(np.diff(np.sign(values)) != 0)[0]
        if not idx.size:
            raise NumericError("alternating minimization lost its bracket")
        roots = [brentq(slope, grid[i], grid[i + 1],
                        xtol=1e-15 * cfg.omega_f, rtol=_BRENTQ_RTOL,
                        maxiter=300) for i in idx]
        Omega_new = min(
            roots, key=lambda w: fermion_energy(w, r_new, omega_c, cfg))

        converged = (abs(Omega_new - Omega) <= rtol * Omega
                     and abs(r_new - r_f) <= rtol * max(r_f, 1e-300))
        Omega, r_f = Omega_new, r_new
        if converged:
            break
    return Omega, r_f, fermion_energy(Omega, r_f, omega_c, cfg)
