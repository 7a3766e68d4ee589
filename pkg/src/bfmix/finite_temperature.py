"""Homogeneous finite-temperature thermodynamics of the mixture.

Free energy, chemical potentials, the stability matrix and its Z
criterion, the critical-temperature window, the T_c / T_F text formulas,
the low-temperature coupling criterion, and the local-density extension.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import CompatMode, MixtureConfig
from .constants import h, k_B, pi
from .errors import ConfigError, DomainError
from .specfun import (
    ZETA_3_2,
    Fugacity,
    PolyOrder,
    Species,
    bose_fugacity_from_density,
    bose_g,
    fermi_f_log,
    fermi_fugacity_from_density,
)

__all__ = [
    "ThermalState", "StabilityReport", "TemperatureWindow",
    "coupling_lengths", "thermal_state", "helmholtz_free_energy",
    "chemical_potentials", "stability_matrix", "critical_window",
    "bec_temperature", "fermi_temperature", "low_T_criterion",
    "lda_local_stability",
]

_WINDOW_SAMPLES = 400
_ROOT_RTOL = 1e-8

# The fugacity inversions and the degenerate f_(1/2) evaluations depend
# only on scalar phase-space inputs, so coupling sweeps at fixed (m, T,
# rho) hit these caches instead of re-running brentq or quadrature.
_bose_from_x = lru_cache(maxsize=4096)(bose_fugacity_from_density)
_fermi_from_x = lru_cache(maxsize=4096)(fermi_fugacity_from_density)


@lru_cache(maxsize=4096)
def _f12_of_ln_z(ln_z):
    return fermi_f_log(PolyOrder.ONE_HALF, ln_z)


def coupling_lengths(cfg):
    """Couplings as lengths (ell_bb, ell_bf, ell_ff) for the finite-T
    formulas, which carry every g with two powers of a thermal
    wavelength.

    Derived mode maps each SI coupling to the scattering length of its
    channel: ell_bb = m_b g_bb / 4 pi hbar^2 and likewise for ff, with
    ell_bf = m_red g_bf / 2 pi hbar^2.  The identities
    beta g_bb = 2 ell_bb lambda_b^2 and
    beta g_bf = ell_bf (lambda_b^2 + lambda_f^2)
    are then exact, so the printed interaction terms reproduce the SI
    mean-field energies.  Paper mode reads the dimensionless coupling as
    the length in units of the boson oscillator length, which is what
    the figure captions quote.
    """
    hbar = h / (2.0 * pi)
    if cfg.compat_mode is CompatMode.PAPER:
        a = cfg.osc_length
        unit = cfg.coupling_unit
        return (cfg.g_bb / unit * a, cfg.g_bf / unit * a, cfg.g_ff / unit * a)
    ell_bb = cfg.m_b * cfg.g_bb / (4.0 * pi * hbar ** 2)
    ell_ff = cfg.m_f * cfg.g_ff / (4.0 * pi * hbar ** 2)
    ell_bf = cfg.reduced_mass * cfg.g_bf / (2.0 * pi * hbar ** 2)
    return (ell_bb, ell_bf, ell_ff)


@dataclass(frozen=True)
class ThermalState:
    """Homogeneous equilibrium state at one temperature."""
    T: float            # K
    beta: float         # 1/(k_B T)
    lambda_b: float     # thermal wavelengths [m]
    lambda_f: float
    z_b: Fugacity
    z_f: Fugacity
    rho_b: float        # densities [1/m^3]
    rho_f: float
    condensed: bool


@dataclass(frozen=True)
class StabilityReport:
    """Stability-matrix entries and the determinant criterion.

    The derivative entries are d mu_i / d rho_j in J m^3.  The two cross
    entries come from independent evaluations (boson row and fermion
    row) and must agree; Z is the determinant form assembled from the
    beta-scaled, coupling-as-length entries, so it carries m^6.
    """
    dmu_b_drho_b: float
    dmu_f_drho_f: float
    dmu_b_drho_f: float
    dmu_f_drho_b: float
    Z: float
    diagonal_ok: tuple
    stable: bool


@dataclass(frozen=True)
class TemperatureWindow:
    """Roots of Z(T) = 0 inside a scanned range.

    exists is True only when two roots bracket an unstable interval.  A
    single sign change leaves one root in whichever slot matches its
    direction: Z < 0 at the low edge fills T_c2 (the recovery
    temperature) and sets unstable_at_low_edge.  More than two sign
    changes set multi_root and keep the outermost pair.
    """
    T_c1: float
    T_c2: float
    exists: bool
    n_sign_changes: int
    multi_root: bool
    unstable_at_low_edge: bool


def _thermal_wavelength(mass, T):
    return h / math.sqrt(2.0 * pi * mass * k_B * T)


def thermal_state(cfg, T):
    """Wavelengths, densities, and fugacities at temperature T [K]."""
    if not T > 0.0:
        raise DomainError(f"temperature must be positive, got {T}")
    cfg.require_volume()
    return _thermal_state_cached(cfg, float(T))


@lru_cache(maxsize=4096)
def _thermal_state_cached(cfg, T):
    beta = 1.0 / (k_B * T)
    lambda_b = _thermal_wavelength(cfg.m_b, T)
    lambda_f = _thermal_wavelength(cfg.m_f, T)
    rho_b = cfg.N_b / cfg.volume
    rho_f = cfg.N_f / cfg.volume
    z_b = _bose_from_x(rho_b * lambda_b ** 3)
    z_f = _fermi_from_x(rho_f * lambda_f ** 3)
    return ThermalState(T=T, beta=beta, lambda_b=lambda_b, lambda_f=lambda_f,
                        z_b=z_b, z_f=z_f, rho_b=rho_b, rho_f=rho_f,
                        condensed=z_b.condensed)


def helmholtz_free_energy(state, cfg):
    """beta F of the homogeneous mixture.

    Ideal parts are the canonical N ln z - (V/lambda^3) h_(5/2)(z)
    combinations; the saddle-point identity N = (V/lambda^3) h_(3/2)(z)
    then makes d(beta F)/dN_i equal ln z_i plus the interaction shifts,
    which is what the chemical potentials report.  The number-fixing
    N ln z pieces ride along for exactly that reason.  In the condensed
    phase ln z_b = 0 and the sub-extensive ln(1 - z_b) is dropped.
    """
    V = cfg.require_volume()
    ell_bb, ell_bf, ell_ff = coupling_lengths(cfg)
    lb, lf = state.lambda_b, state.lambda_f
    z_b, z_f = state.z_b, state.z_f

    out = -(V / lf ** 3) * fermi_f_log(PolyOrder.FIVE_HALVES, z_f.ln_z)
    out += cfg.N_f * z_f.ln_z
    out -= (V / lb ** 3) * bose_g(PolyOrder.FIVE_HALVES, z_b.z)
    if not state.condensed:
        out += cfg.N_b * z_b.ln_z + math.log1p(-z_b.z)
    out += 0.5 * ell_ff * state.rho_f * cfg.N_f * lf ** 2
    out += 2.0 * ell_bb * state.rho_b * cfg.N_b * lb ** 2
    out += ell_bf * (lb ** 2 + lf ** 2) * cfg.N_f * cfg.N_b / V
    return out


def chemical_potentials(state, cfg):
    """(mu_b, mu_f) in joules: ideal ln z parts plus mean-field shifts."""
    ell_bb, ell_bf, ell_ff = coupling_lengths(cfg)
    lb, lf = state.lambda_b, state.lambda_f
    # condensed phase: z_b = 1, so the ideal part ln z_b vanishes on its own
    beta_mu_b = (state.z_b.ln_z + 4.0 * ell_bb * state.rho_b * lb ** 2
                 + ell_bf * (lb ** 2 + lf ** 2) * state.rho_f)
    beta_mu_f = (state.z_f.ln_z + ell_ff * state.rho_f * lf ** 2
                 + ell_bf * (lb ** 2 + lf ** 2) * state.rho_b)
    return (beta_mu_b / state.beta, beta_mu_f / state.beta)


def _cross_entry_boson_row(ell_bf, lb, lf):
    # d(beta mu_b)/d rho_f, term by term from the boson chemical potential
    return ell_bf * lb ** 2 + ell_bf * lf ** 2


def _cross_entry_fermion_row(ell_bf, lb, lf):
    # d(beta mu_f)/d rho_b from the fermion chemical potential
    return ell_bf * (lb ** 2 + lf ** 2)


def stability_matrix(state, cfg):
    """Matrix entries and the determinant criterion Z.

    The beta-scaled entries are 4 ell_bb lambda_b^2 + lambda_b^3/g_(1/2)
    (second term exactly zero in the condensed phase), ell_ff lambda_f^2
    + lambda_f^3/f_(1/2), and ell_bf (lambda_b^2 + lambda_f^2); Z is
    their determinant combination.
    """
    ell_bb, ell_bf, ell_ff = coupling_lengths(cfg)
    lb, lf = state.lambda_b, state.lambda_f
    if state.condensed:
        ideal_b = 0.0
    else:
        g12 = bose_g(PolyOrder.ONE_HALF, state.z_b.z)
        if g12 == 0.0:
            ideal_b = math.inf  # empty gas: ideal compressibility diverges
        else:
            ideal_b = lb ** 3 / g12 if math.isfinite(g12) else 0.0
    f12 = _f12_of_ln_z(state.z_f.ln_z)
    bb = 4.0 * ell_bb * lb ** 2 + ideal_b
    ff = ell_ff * lf ** 2 + (math.inf if f12 == 0.0 else lf ** 3 / f12)
    cross_b = _cross_entry_boson_row(ell_bf, lb, lf)
    cross_f = _cross_entry_fermion_row(ell_bf, lb, lf)
    Z = bb * ff - ell_bf ** 2 * (lb ** 2 + lf ** 2) ** 2
    diagonal_ok = (bb >= 0.0, ff >= 0.0)
    kT = 1.0 / state.beta
    return StabilityReport(
        dmu_b_drho_b=bb * kT,
        dmu_f_drho_f=ff * kT,
        dmu_b_drho_f=cross_b * kT,
        dmu_f_drho_b=cross_f * kT,
        Z=Z,
        diagonal_ok=diagonal_ok,
        stable=all(diagonal_ok) and Z >= 0.0,
    )


def _z_of_T(cfg, T, r=0.0):
    if r > 0.0:
        return lda_local_stability(cfg, T, r).Z
    return stability_matrix(thermal_state(cfg, T), cfg).Z


def critical_window(cfg, T_range, r=0.0, rtol=None):
    """Scan Z over a log grid in T and bracket its roots.

    400 samples, each sign change refined by bisection to rtol relative
    (1e-8 by default).  The optional r evaluates the local-density
    criterion at radius r instead of the homogeneous one.
    """
    T_lo, T_hi = T_range
    if not (0.0 < T_lo < T_hi):
        raise DomainError(
            f"need 0 < T_lo < T_hi, got [{T_lo}, {T_hi}]")
    if rtol is None:
        rtol = _ROOT_RTOL
    elif not 0.0 < rtol < 1.0:
        raise ConfigError(f"window rtol must be in (0, 1), got {rtol}")
    grid = np.geomspace(T_lo, T_hi, _WINDOW_SAMPLES)
    values = [_z_of_T(cfg, T, r) for T in grid]

    roots = []
    for i in range(len(grid) - 1):
        a, b = values[i], values[i + 1]
        if a == 0.0:
            roots.append(grid[i])
            continue
        if a * b < 0.0:
            lo, hi = grid[i], grid[i + 1]
            f_lo = a
            while hi - lo > rtol * hi:
                mid = 0.5 * (lo + hi)
                f_mid = _z_of_T(cfg, mid, r)
                if f_mid == 0.0:
                    lo = hi = mid
                    break
                if (f_lo < 0.0) == (f_mid < 0.0):
                    lo, f_lo = mid, f_mid
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    if values[-1] == 0.0:
        roots.append(grid[-1])

    n = len(roots)
    unstable_low = values[0] < 0.0
    if n >= 2:
        return TemperatureWindow(T_c1=roots[0], T_c2=roots[-1], exists=True,
                                 n_sign_changes=n, multi_root=n > 2,
                                 unstable_at_low_edge=unstable_low)
    if n == 1:
        # one crossing only: the root closes an interval open at an edge
        if unstable_low:
            return TemperatureWindow(T_c1=None, T_c2=roots[0], exists=False,
                                     n_sign_changes=1, multi_root=False,
                                     unstable_at_low_edge=True)
        return TemperatureWindow(T_c1=roots[0], T_c2=None, exists=False,
                                 n_sign_changes=1, multi_root=False,
                                 unstable_at_low_edge=False)
    return TemperatureWindow(T_c1=None, T_c2=None, exists=False,
                             n_sign_changes=0, multi_root=False,
                             unstable_at_low_edge=unstable_low)


def bec_temperature(cfg):
    """Ideal-gas condensation temperature of the boson component."""
    V = cfg.require_volume()
    return (h ** 2 / (2.0 * pi * cfg.m_b * k_B)
            * (cfg.N_b / (ZETA_3_2 * V)) ** (2.0 / 3.0))


def fermi_temperature(cfg):
    """Fermi temperature of the fermion component.

    Paper mode keeps the printed (3 N_f / 8 pi V)^(2/3) coefficient;
    derived mode uses (3 N_f / 4 pi V)^(2/3), which is E_F/k_B for a
    single spin component and what the degenerate-limit checks assume.
    When the boson gas dominates (N_b >= 100 N_f) the stated ordering
    T_F < T_c is asserted.
    """
    V = cfg.require_volume()
    denom = 8.0 if cfg.compat_mode is CompatMode.PAPER else 4.0
    T_F = (h ** 2 / (2.0 * cfg.m_f * k_B)
           * (3.0 * cfg.N_f / (denom * pi * V)) ** (2.0 / 3.0))
    if cfg.N_b >= 100.0 * cfg.N_f:
        T_c = bec_temperature(cfg)
        if T_F >= T_c:
            raise DomainError(
                f"expected T_F < T_c for a boson-dominated mixture, got "
                f"T_F={T_F:.6g} K >= T_c={T_c:.6g} K")
    return T_F


def low_T_criterion(cfg):
    """The T << T_F stability label ell_bb ell_ff - ell_bf^2 [m^2].

    Only its sign is meaningful; it is the coupling-space boundary the
    full Z criterion approaches in the deeply degenerate regime, up to
    wavelength prefactors that do not cancel exactly.
    """
    if not math.isclose(cfg.m_f, cfg.m_b, rel_tol=1e-12):
        raise DomainError(
            f"the low-T criterion assumes m_f = m_b, got m_b={cfg.m_b}, "
            f"m_f={cfg.m_f}")
    ell_bb, ell_bf, ell_ff = coupling_lengths(cfg)
    return ell_bb * ell_ff - ell_bf ** 2


def lda_local_stability(cfg, T, r):
    """Stability matrix at radius r with trap-damped local fugacities.

    ln z_i is shifted by -beta m_i omega_i^2 r^2 / 2 and the local
    densities are recomputed from the ideal relations.  Working on ln z
    keeps the deeply degenerate fermion branch finite.
    """
    if not r >= 0.0:
        raise DomainError(f"radius must be >= 0, got {r}")
    base = thermal_state(cfg, T)
    if r == 0.0:
        return stability_matrix(base, cfg)
    beta = base.beta
    ln_zb = base.z_b.ln_z - 0.5 * beta * cfg.m_b * cfg.omega_b ** 2 * r ** 2
    ln_zf = base.z_f.ln_z - 0.5 * beta * cfg.m_f * cfg.omega_f ** 2 * r ** 2
    zb_local = math.exp(ln_zb)
    z_b = Fugacity(zb_local, Species.BOSE, ln_z=ln_zb)
    z_f = Fugacity(math.exp(ln_zf) if ln_zf < 709.0 else math.inf,
                   Species.FERMI, ln_z=ln_zf)
    rho_b = bose_g(PolyOrder.THREE_HALVES, zb_local) / base.lambda_b ** 3
    rho_f = (fermi_f_log(PolyOrder.THREE_HALVES, ln_zf)
             / base.lambda_f ** 3)
    local = ThermalState(T=base.T, beta=beta, lambda_b=base.lambda_b,
                         lambda_f=base.lambda_f, z_b=z_b, z_f=z_f,
                         rho_b=rho_b, rho_f=rho_f, condensed=False)
    return stability_matrix(local, cfg)
