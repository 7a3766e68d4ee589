"""Mixture configuration: one frozen dataclass, SI units internally.

Two input unit systems are accepted:

* ``si``          masses kg (or atomic units via mass_u), trap angular
                  frequencies rad/s, couplings J m^3 (or scattering
                  lengths in meters), volume m^3, temperature K.
* ``oscillator``  couplings in hbar*omega_f*a^3 where a = sqrt(hbar /
                  (omega_b m_b)) is the boson oscillator length, volume
                  in a^3, temperature in hbar*omega_f/k_B.  Frequencies
                  are rad/s in both systems, masses via mass_u/mass_kg.

Whatever the input system, a MixtureConfig always stores SI values; the
unit_system field only records how the input was expressed (and sets the
units of values swept by the scan engine).

compat_mode selects between the two published sets of prefactors for the
energy functionals (see zero_temperature); Derived is the default.
"""

import enum
import json
import math
from dataclasses import dataclass, replace

from .constants import hbar, k_B, atomic_mass
from .errors import ConfigError

__all__ = [
    "UnitSystem", "CompatMode", "MixtureConfig", "load_config",
    "config_from_dict",
]


class UnitSystem(enum.Enum):
    OSCILLATOR = "oscillator"
    SI = "si"


class CompatMode(enum.Enum):
    PAPER = "paper"
    DERIVED = "derived"


@dataclass(frozen=True)
class MixtureConfig:
    """All physical parameters of one Bose-Fermi mixture, in SI."""
    m_b: float              # boson mass [kg]
    m_f: float              # fermion mass [kg]
    omega_b: float          # boson trap frequency [rad/s]
    omega_f: float          # fermion trap frequency [rad/s]
    N_b: float              # boson count
    N_f: float              # fermion count
    g_bb: float             # boson-boson coupling [J m^3]
    g_bf: float             # boson-fermion coupling [J m^3]
    g_ff: float = 0.0       # fermion-fermion coupling [J m^3]
    volume: float = None    # homogeneous volume [m^3], finite-T only
    temperature: float = None   # default temperature [K], finite-T only
    unit_system: UnitSystem = UnitSystem.SI
    compat_mode: CompatMode = CompatMode.DERIVED

    def __post_init__(self):
        for name in ("m_b", "m_f", "omega_b", "omega_f", "N_b", "N_f"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0
                    and math.isfinite(value)):
                raise ConfigError(f"{name} must be strictly positive, got {value}")
        for name in ("g_bb", "g_bf", "g_ff"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ConfigError(f"{name} must be a finite real, got {value}")
        if self.volume is not None and not self.volume > 0:
            raise ConfigError(f"volume must be positive, got {self.volume}")
        if self.temperature is not None and not self.temperature > 0:
            raise ConfigError(
                f"temperature must be positive, got {self.temperature}")

    # oscillator-unit conversion anchors
    @property
    def osc_length(self):
        """Boson oscillator length a = sqrt(hbar / (omega_b m_b))."""
        return math.sqrt(hbar / (self.omega_b * self.m_b))

    @property
    def coupling_unit(self):
        """hbar omega_f a^3, the oscillator unit of the couplings."""
        return hbar * self.omega_f * self.osc_length ** 3

    @property
    def temperature_unit(self):
        """hbar omega_f / k_B, the oscillator unit of temperature."""
        return hbar * self.omega_f / k_B

    @property
    def reduced_mass(self):
        return self.m_b * self.m_f / (self.m_b + self.m_f)

    def require_volume(self):
        if self.volume is None:
            raise ConfigError(
                "thermal.volume is required for homogeneous finite-T analysis")
        return self.volume

    # ---- factories -------------------------------------------------

    @classmethod
    def from_si(cls, m_b, m_f, omega_b, omega_f, N_b, N_f,
                g_bb, g_bf, g_ff=0.0, volume=None, temperature=None,
                compat_mode=CompatMode.DERIVED):
        return cls(m_b=m_b, m_f=m_f, omega_b=omega_b, omega_f=omega_f,
                   N_b=N_b, N_f=N_f, g_bb=g_bb, g_bf=g_bf, g_ff=g_ff,
                   volume=volume, temperature=temperature,
                   unit_system=UnitSystem.SI, compat_mode=compat_mode)

    @classmethod
    def from_oscillator(cls, m_b, m_f, omega_b, omega_f, N_b, N_f,
                        g_bb, g_bf, g_ff=0.0, volume=None, temperature=None,
                        compat_mode=CompatMode.DERIVED):
        """Couplings in hbar omega_f a^3, volume in a^3, temperature in
        hbar omega_f / k_B; masses in kg, frequencies in rad/s."""
        if not (m_b > 0 and omega_b > 0 and omega_f > 0):
            raise ConfigError("masses and frequencies must be strictly "
                              "positive for oscillator-unit conversion")
        a = math.sqrt(hbar / (omega_b * m_b))
        gu = hbar * omega_f * a ** 3
        return cls(m_b=m_b, m_f=m_f, omega_b=omega_b, omega_f=omega_f,
                   N_b=N_b, N_f=N_f,
                   g_bb=g_bb * gu, g_bf=g_bf * gu, g_ff=g_ff * gu,
                   volume=None if volume is None else volume * a ** 3,
                   temperature=(None if temperature is None
                                else temperature * hbar * omega_f / k_B),
                   unit_system=UnitSystem.OSCILLATOR, compat_mode=compat_mode)

    @classmethod
    def from_scattering_lengths(cls, m_b, m_f, omega_b, omega_f, N_b, N_f,
                                a_bb, a_bf, a_ff=0.0, volume=None,
                                temperature=None,
                                compat_mode=CompatMode.DERIVED):
        """Scattering lengths in meters; g = 4 pi hbar^2 a / m within a
        species, g_bf = 2 pi hbar^2 a_bf / m_red across species."""
        m_red = m_b * m_f / (m_b + m_f)
        return cls(m_b=m_b, m_f=m_f, omega_b=omega_b, omega_f=omega_f,
                   N_b=N_b, N_f=N_f,
                   g_bb=4.0 * math.pi * hbar ** 2 * a_bb / m_b,
                   g_bf=2.0 * math.pi * hbar ** 2 * a_bf / m_red,
                   g_ff=4.0 * math.pi * hbar ** 2 * a_ff / m_f,
                   volume=volume, temperature=temperature,
                   unit_system=UnitSystem.SI, compat_mode=compat_mode)

    # ---- field paths for scans and error messages -------------------

    def with_field(self, path, value_si):
        """Return a copy with one dotted config field replaced (SI value)."""
        attr = _FIELD_PATHS.get(path)
        if attr is None:
            raise ConfigError(f"unknown config field path '{path}'")
        return replace(self, **{attr: value_si})

    def field_to_si(self, path, value_input):
        """Convert a value of the dotted field from this config's input
        unit system to SI."""
        attr = _FIELD_PATHS.get(path)
        if attr is None:
            raise ConfigError(f"unknown config field path '{path}'")
        if self.unit_system is UnitSystem.SI:
            return float(value_input)
        scale = 1.0
        if attr in ("g_bb", "g_bf", "g_ff"):
            scale = self.coupling_unit
        elif attr == "volume":
            scale = self.osc_length ** 3
        elif attr == "temperature":
            scale = self.temperature_unit
        return float(value_input) * scale


_FIELD_PATHS = {
    "boson.mass": "m_b",
    "boson.omega": "omega_b",
    "boson.count": "N_b",
    "fermion.mass": "m_f",
    "fermion.omega": "omega_f",
    "fermion.count": "N_f",
    "interaction.g_bb": "g_bb",
    "interaction.g_bf": "g_bf",
    "interaction.g_ff": "g_ff",
    "thermal.volume": "volume",
    "thermal.temperature": "temperature",
}


# ---------------------------------------------------------------------------
# JSON config loading (strict schema: unknown keys are rejected by path)
# ---------------------------------------------------------------------------

_SPECIES_KEYS = {"mass_u", "mass_kg", "omega", "count"}
_INTERACTION_KEYS = {"g_bb", "g_bf", "g_ff", "a_bb", "a_bf", "a_ff"}
_THERMAL_KEYS = {"volume", "temperature", "t_range"}
_TOP_KEYS = {"unit_system", "compat_mode", "boson", "fermion",
             "interaction", "thermal", "scan"}


def _reject_unknown(mapping, allowed, section):
    for key in mapping:
        if key not in allowed:
            where = f"{section}.{key}" if section else key
            raise ConfigError(f"unknown config key '{where}'")


def _require(mapping, key, section):
    if key not in mapping:
        raise ConfigError(f"missing config field '{section}.{key}'"
                          if section else f"missing config field '{key}'")
    return mapping[key]


def _species(mapping, section):
    if not isinstance(mapping, dict):
        raise ConfigError(f"'{section}' must be an object")
    _reject_unknown(mapping, _SPECIES_KEYS, section)
    has_u = "mass_u" in mapping
    has_kg = "mass_kg" in mapping
    if has_u == has_kg:
        raise ConfigError(
            f"exactly one of '{section}.mass_u' or '{section}.mass_kg' required")
    mass = (mapping["mass_u"] * atomic_mass) if has_u else mapping["mass_kg"]
    omega = _require(mapping, "omega", section)
    count = _require(mapping, "count", section)
    return mass, float(omega), float(count)


def config_from_dict(data):
    """Build a MixtureConfig from a parsed JSON object (strict schema).

    Returns (config, extras) where extras carries the optional
    'thermal.t_range' and 'scan' sections for the CLI.
    """
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    _reject_unknown(data, _TOP_KEYS, "")

    unit_name = _require(data, "unit_system", "")
    try:
        unit_system = UnitSystem(unit_name)
    except ValueError:
        raise ConfigError(
            f"unit_system must be 'oscillator' or 'si', got {unit_name!r}")
    try:
        compat_mode = CompatMode(data.get("compat_mode", "derived"))
    except ValueError:
        raise ConfigError("compat_mode must be 'paper' or 'derived', "
                          f"got {data['compat_mode']!r}")

    m_b, omega_b, N_b = _species(_require(data, "boson", ""), "boson")
    m_f, omega_f, N_f = _species(_require(data, "fermion", ""), "fermion")

    inter = _require(data, "interaction", "")
    if not isinstance(inter, dict):
        raise ConfigError("'interaction' must be an object")
    _reject_unknown(inter, _INTERACTION_KEYS, "interaction")
    has_g = any(k in inter for k in ("g_bb", "g_bf", "g_ff"))
    has_a = any(k in inter for k in ("a_bb", "a_bf", "a_ff"))
    if has_g == has_a:
        raise ConfigError("interaction requires exactly one family: "
                          "couplings (g_bb, g_bf, g_ff) or scattering "
                          "lengths (a_bb, a_bf, a_ff)")

    thermal = data.get("thermal", {})
    if not isinstance(thermal, dict):
        raise ConfigError("'thermal' must be an object")
    _reject_unknown(thermal, _THERMAL_KEYS, "thermal")
    volume = thermal.get("volume")
    temperature = thermal.get("temperature")
    t_range = thermal.get("t_range")
    if t_range is not None:
        if (not isinstance(t_range, (list, tuple)) or len(t_range) != 2
                or not 0 < t_range[0] < t_range[1]):
            raise ConfigError(
                "thermal.t_range must be [T_lo, T_hi] with 0 < T_lo < T_hi")

    common = dict(m_b=m_b, m_f=m_f, omega_b=omega_b, omega_f=omega_f,
                  N_b=N_b, N_f=N_f, volume=volume, temperature=temperature,
                  compat_mode=compat_mode)
    if has_a:
        # scattering lengths are SI meters in either unit system
        cfg = MixtureConfig.from_scattering_lengths(
            a_bb=_require(inter, "a_bb", "interaction"),
            a_bf=_require(inter, "a_bf", "interaction"),
            a_ff=inter.get("a_ff", 0.0), **common)
        if unit_system is UnitSystem.OSCILLATOR:
            a3 = cfg.osc_length ** 3
            cfg = replace(
                cfg,
                volume=None if volume is None else volume * a3,
                temperature=(None if temperature is None
                             else temperature * cfg.temperature_unit),
                unit_system=UnitSystem.OSCILLATOR)
    else:
        g_bb = _require(inter, "g_bb", "interaction")
        g_bf = _require(inter, "g_bf", "interaction")
        g_ff = inter.get("g_ff", 0.0)
        if unit_system is UnitSystem.OSCILLATOR:
            cfg = MixtureConfig.from_oscillator(
                g_bb=g_bb, g_bf=g_bf, g_ff=g_ff, **common)
        else:
            cfg = MixtureConfig.from_si(
                g_bb=g_bb, g_bf=g_bf, g_ff=g_ff, **common)

    t_range_si = None
    if t_range is not None:
        unit = (cfg.temperature_unit
                if unit_system is UnitSystem.OSCILLATOR else 1.0)
        t_range_si = (t_range[0] * unit, t_range[1] * unit)
    extras = {"t_range": t_range_si, "scan": data.get("scan")}
    return cfg, extras


def load_config(path):
    """Parse a JSON config file into (MixtureConfig, extras)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config file {path} is not valid JSON "
            f"(line {exc.lineno}, column {exc.colno}): {exc.msg}") from exc
    return config_from_dict(data)
