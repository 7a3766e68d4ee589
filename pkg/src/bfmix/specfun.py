"""Bose and Fermi integrals g_nu, f_nu and fugacity inversion.

Conventions (the standard polylogarithm ones, the only choice that
reproduces the textbook ideal-gas relations and the 2.612 condensation
constant):

    g_nu(z) =  sum_{k>=1} z^k / k^nu          (= Li_nu(z)),   0 <= z <= 1
    f_nu(z) = -sum_{k>=1} (-z)^k / k^nu       (= -Li_nu(-z)),  z >= 0

Only the orders 1/2, 3/2, 5/2 are supported; they are the only ones the
thermodynamics of this package needs.

Evaluation strategy
-------------------
* z <= 0.5          direct power series (relative cutoff 1e-15, at most
                    1e5 terms).
* Bose, z > 0.5     Robinson expansion in alpha = -ln z:
                    g_nu(e^-alpha) = Gamma(1-nu) alpha^(nu-1)
                                     + sum_k zeta(nu-k) (-alpha)^k / k!
                    The expansion converges geometrically with ratio
                    alpha/2pi < 0.12 on this range.  It applies to
                    nu = 1/2 as well (the plain series is uselessly slow
                    just below z = 1, where g_(1/2) must still be
                    accurate for the condensation machinery).
* Fermi, 0.5<z<=1   the analogous expansion in mu = ln z with the Dirichlet
                    eta function: f_nu(e^mu) = sum_k eta(nu-k) mu^k / k!.
* Fermi, z > 1      adaptive quadrature of the integral representation
                    f_nu(z) = (2/Gamma(nu)) int_0^inf t^(2nu-1)
                              sigma(mu - t^2) dt   (x = t^2, sigma = logistic),
                    split at t = sqrt(mu) where the kernel drops.

g_(1/2) diverges at z = 1.  For z >= 1 - 1e-13 the function returns
``math.inf`` as the documented divergence signal; thermodynamic callers
map it to the condensed-phase convention lambda^3/g_(1/2) -> 0.
"""

import enum
import math
from dataclasses import dataclass, field

from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import expit, zeta as _zeta

from .errors import DomainError, NumericError

__all__ = [
    "PolyOrder", "Species", "Fugacity",
    "bose_g", "fermi_f", "fermi_f_log",
    "bose_fugacity_from_density", "fermi_fugacity_from_density",
    "ZETA_3_2",
]


class PolyOrder(enum.Enum):
    """Order nu of g_nu/f_nu; construction rejects anything but the
    three orders used by the physics."""
    ONE_HALF = 0.5
    THREE_HALVES = 1.5
    FIVE_HALVES = 2.5

    @property
    def nu(self):
        return self.value


def _as_order(nu):
    if isinstance(nu, PolyOrder):
        return nu
    return PolyOrder(float(nu))  # ValueError for unsupported orders


class Species(enum.Enum):
    BOSE = "bose"
    FERMI = "fermi"


@dataclass(frozen=True)
class Fugacity:
    """Fugacity z = exp(beta mu0) of one component.

    ``ln_z`` duplicates log(z) but stays finite deep in the degenerate
    Fermi regime where z itself overflows to inf (ln z ~ E_F/k_B T can
    exceed 710).  ``condensed`` marks the Bose z = 1 saturation.
    """
    z: float
    species: Species
    condensed: bool = False
    ln_z: float = field(default=None)

    def __post_init__(self):
        if self.ln_z is None:
            object.__setattr__(self, "ln_z",
                               math.log(self.z) if self.z > 0 else -math.inf)
        if self.species is Species.BOSE and not 0.0 <= self.z <= 1.0:
            raise DomainError(f"Bose fugacity must lie in [0, 1], got {self.z}")
        if self.species is Species.FERMI and not self.z >= 0.0:
            raise DomainError(f"Fermi fugacity must be >= 0, got {self.z}")


# zeta(nu - k) tables for the Robinson / eta expansions.  scipy's zeta
# handles negative arguments; nu - k is never 1, so the pole is never hit.
_K_MAX = 80


def _zeta_row(nu):
    return [float(_zeta(nu - k)) for k in range(_K_MAX + 1)]


_ZETA_TABLE = {order: _zeta_row(order.value) for order in PolyOrder}
# Dirichlet eta: eta(s) = (1 - 2^(1-s)) zeta(s)
_ETA_TABLE = {
    order: [(1.0 - 2.0 ** (1.0 - (order.value - k))) * _ZETA_TABLE[order][k]
            for k in range(_K_MAX + 1)]
    for order in PolyOrder
}
# Gamma(1 - nu) prefactors of the non-analytic Robinson term
_GAMMA_1_MINUS_NU = {order: math.gamma(1.0 - order.value) for order in PolyOrder}

ZETA_3_2 = _ZETA_TABLE[PolyOrder.THREE_HALVES][0]   # g_(3/2)(1) = 2.61237534...

_SERIES_MAX_TERMS = 100_000
_SERIES_RTOL = 1e-15


def _power_series(nu, z, sign):
    """sum_k sign^(k-1) z^k / k^nu, truncated at relative 1e-15."""
    total = 0.0
    zk = 1.0  # z^k, maintained incrementally
    for k in range(1, _SERIES_MAX_TERMS + 1):
        zk *= z
        term = zk / k ** nu
        if sign < 0 and k % 2 == 0:
            term = -term
        total += term
        if abs(term) <= _SERIES_RTOL * abs(total):
            return total
    return total


def _robinson(order, alpha):
    """Bose function near z = 1: Gamma(1-nu) alpha^(nu-1) + zeta series."""
    nu = order.value
    row = _ZETA_TABLE[order]
    acc = _GAMMA_1_MINUS_NU[order] * alpha ** (nu - 1.0) if alpha > 0.0 else 0.0
    if alpha == 0.0:
        return row[0]
    fac = 1.0  # (-alpha)^k / k!
    for k in range(_K_MAX + 1):
        term = row[k] * fac
        acc += term
        fac *= -alpha / (k + 1)
        if k > 2 and abs(term) <= 1e-17 * max(abs(acc), 1e-300):
            break
    return acc


def _eta_expansion(order, mu):
    """Fermi function around z = 1: sum_k eta(nu-k) mu^k / k!, |mu| < pi."""
    row = _ETA_TABLE[order]
    acc = 0.0
    fac = 1.0  # mu^k / k!
    for k in range(_K_MAX + 1):
        term = row[k] * fac
        acc += term
        fac *= mu / (k + 1)
        if k > 2 and abs(term) <= 1e-17 * max(abs(acc), 1e-300):
            break
    return acc


def bose_g(nu, z):
    """Bose integral g_nu(z) for 0 <= z <= 1.

    Returns math.inf (the divergence signal) for nu = 1/2 when
    z >= 1 - 1e-13; raises DomainError outside [0, 1].
    """
    order = _as_order(nu)
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"bose_g requires 0 <= z <= 1, got z={z}")
    if z == 0.0:
        return 0.0
    if order is PolyOrder.ONE_HALF and z >= 1.0 - 1e-13:
        return math.inf
    if z <= 0.5:
        return _power_series(order.value, z, +1)
    return _robinson(order, -math.log(z))


def fermi_f_log(nu, ln_z):
    """Fermi integral as a function of mu = ln z; usable when z itself
    would overflow (degenerate regime, mu up to ~1e18)."""
    order = _as_order(nu)
    if ln_z == -math.inf:
        return 0.0
    if ln_z <= math.log(0.5):
        return _power_series(order.value, math.exp(ln_z), -1)
    if ln_z <= 0.0:
        return _eta_expansion(order, ln_z)
    return _fermi_quadrature(order, ln_z)


def fermi_f(nu, z):
    """Fermi integral f_nu(z) for z >= 0 (unbounded above)."""
    order = _as_order(nu)
    if not z >= 0.0:
        raise DomainError(f"fermi_f requires z >= 0, got z={z}")
    if z == 0.0:
        return 0.0
    return fermi_f_log(order, math.log(z))


def _fermi_quadrature(order, mu):
    """(2/Gamma(nu)) int_0^inf t^(2nu-1) sigma(mu - t^2) dt, split at the
    Fermi edge t = sqrt(mu); the tail beyond t^2 = mu + 40 is below 1e-17
    of the total."""
    nu = order.value
    p = 2.0 * nu - 1.0

    def integrand(t):
        return t ** p * expit(mu - t * t)

    edge = math.sqrt(mu)
    upper = math.sqrt(mu + 40.0)
    inner, ierr = quad(integrand, 0.0, edge, epsabs=0.0, epsrel=1e-13, limit=200)
    outer, oerr = quad(integrand, edge, upper, epsabs=0.0, epsrel=1e-13, limit=200)
    total = inner + outer
    if not math.isfinite(total):
        raise NumericError(f"fermi quadrature failed at nu={nu}, ln z={mu}")
    return 2.0 / math.gamma(nu) * total


_BRENTQ_RTOL = 4.0 * 2.220446049250313e-16  # tightest rtol brentq accepts


def bose_fugacity_from_density(rho_lambda3):
    """Invert rho lambda^3 = g_(3/2)(z) for the Bose fugacity.

    At or above the condensation value g_(3/2)(1) = 2.612..., the result
    is z = 1 with the condensed marker set.
    """
    if not rho_lambda3 >= 0.0:
        raise DomainError(f"phase-space density must be >= 0, got {rho_lambda3}")
    if rho_lambda3 == 0.0:
        return Fugacity(0.0, Species.BOSE)
    if rho_lambda3 >= ZETA_3_2:
        return Fugacity(1.0, Species.BOSE, condensed=True)
    z = brentq(lambda zz: bose_g(PolyOrder.THREE_HALVES, zz) - rho_lambda3,
               0.0, 1.0, xtol=1e-300, rtol=_BRENTQ_RTOL, maxiter=200)
    return Fugacity(z, Species.BOSE)


def fermi_fugacity_from_density(rho_lambda3):
    """Invert rho lambda^3 = f_(3/2)(z) for the Fermi fugacity.

    f_(3/2) is strictly increasing and unbounded, so a root always
    exists.  Solved in z on [0, 1] for small densities and in mu = ln z
    above f_(3/2)(1), where the Sommerfeld estimate
    mu ~ (3 sqrt(pi) x / 4)^(2/3) seeds the bracket.
    """
    if not rho_lambda3 >= 0.0:
        raise DomainError(f"phase-space density must be >= 0, got {rho_lambda3}")
    x = rho_lambda3
    if x == 0.0:
        return Fugacity(0.0, Species.FERMI)
    f32_at_1 = _ETA_TABLE[PolyOrder.THREE_HALVES][0]
    if x <= f32_at_1:
        z = brentq(lambda zz: fermi_f(PolyOrder.THREE_HALVES, zz) - x,
                   0.0, 1.0, xtol=1e-300, rtol=_BRENTQ_RTOL, maxiter=200)
        return Fugacity(z, Species.FERMI)

    def resid(mu):
        return fermi_f_log(PolyOrder.THREE_HALVES, mu) - x

    mu_est = (0.75 * math.sqrt(math.pi) * x) ** (2.0 / 3.0)
    lo, hi = 0.0, max(2.0, 1.5 * mu_est + 2.0)
    for _ in range(60):
        if resid(hi) >= 0.0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NumericError("fermi fugacity bracket expansion exhausted")
    mu = brentq(resid, lo, hi, xtol=1e-13 * max(1.0, mu_est),
                rtol=_BRENTQ_RTOL, maxiter=200)
    z = math.exp(mu) if mu < 709.0 else math.inf
    return Fugacity(z, Species.FERMI, ln_z=mu)
