"""Deterministic parameter sweeps and the figure presets.

A scan varies one or two dotted config fields over fixed grids and
tabulates a named observable at every point.  Points are independent,
so evaluation may be parallel, but rows are always assembled in grid
order and carry a per-point status instead of failing the whole sweep.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .config import CompatMode, MixtureConfig
from .constants import atomic_mass
from .errors import ConfigError, DomainError, NumericError
from .finite_temperature import (
    critical_window,
    fermi_temperature,
    stability_matrix,
    thermal_state,
)
from .thomas_fermi import classify_tf_regime
from .zero_temperature import classify_zero_T, solve_Omega_c, solve_omega_c

__all__ = ["ScanRange", "ScanSpec", "ScanTable", "run_scan",
           "figure_preset", "scan_spec_from_dict", "OBSERVABLES",
           "PRESET_TAGS"]

_COLUMN_NAMES = {
    "boson.mass": "m_b", "boson.omega": "omega_b", "boson.count": "N_b",
    "fermion.mass": "m_f", "fermion.omega": "omega_f",
    "fermion.count": "N_f",
    "interaction.g_bb": "g_bb", "interaction.g_bf": "g_bf",
    "interaction.g_ff": "g_ff",
    "thermal.volume": "V", "thermal.temperature": "T",
}


@dataclass(frozen=True)
class ScanRange:
    """Grid over one dotted config field, in the input units of the base
    config.  Either from/to/points/scale or an explicit values tuple."""
    field: str
    start: float = None
    stop: float = None
    points: int = None
    scale: str = "linear"
    values: tuple = None

    def __post_init__(self):
        if self.field not in _COLUMN_NAMES:
            raise ConfigError(f"unknown scan field '{self.field}'")
        if self.values is not None:
            vals = tuple(float(v) for v in self.values)
            if not vals:
                raise ConfigError(f"scan.{self.field}: empty values list")
            object.__setattr__(self, "values", vals)
            return
        if self.points is None or self.points < 2:
            raise ConfigError(
                f"scan.{self.field}: points must be >= 2, got {self.points}")
        if self.start is None or self.stop is None or self.start == self.stop:
            raise ConfigError(
                f"scan.{self.field}: need from != to, got "
                f"[{self.start}, {self.stop}]")
        if self.scale not in ("linear", "log"):
            raise ConfigError(
                f"scan.{self.field}: scale must be linear or log, "
                f"got '{self.scale}'")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ConfigError(
                f"scan.{self.field}: log scale needs positive endpoints")

    def grid(self):
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class ScanSpec:
    """One or two swept fields, an observable, and the base config."""
    base: MixtureConfig
    variables: tuple
    observable: str
    preset: str = None
    t_range: tuple = None       # (lo, hi) input units, for T_c1/T_c2
    caption_fixed: tuple = ()   # provenance: pinned by the figure
    reproduction: tuple = ()    # provenance: our choices


@dataclass(frozen=True)
class ScanTable:
    columns: tuple
    rows: tuple
    provenance: tuple


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------

def _obs_omega_c(cfg, spec):
    return solve_omega_c(cfg).omega_c


def _obs_Omega_c(cfg, spec):
    # the fully coupled width, which is what the frequency figure plots
    boson = solve_omega_c(cfg)
    return solve_Omega_c(boson.omega_c, cfg)


def _obs_Y(cfg, spec):
    return classify_zero_T(cfg).Y


def _obs_r_fc(cfg, spec):
    return classify_zero_T(cfg).r_fc


def _obs_phase(cfg, spec):
    return classify_zero_T(cfg).phase.value


def _obs_regime(cfg, spec):
    return classify_tf_regime(cfg).value


def _obs_Z(cfg, spec):
    if cfg.temperature is None:
        raise ConfigError(
            "thermal.temperature is required for the Z observable")
    return stability_matrix(thermal_state(cfg, cfg.temperature), cfg).Z


def _window_of(cfg, spec):
    lo = spec.base.field_to_si("thermal.temperature", spec.t_range[0])
    hi = spec.base.field_to_si("thermal.temperature", spec.t_range[1])
    return critical_window(cfg, (lo, hi))


def _obs_T_c1(cfg, spec):
    T = _window_of(cfg, spec).T_c1
    return math.nan if T is None else T


def _obs_T_c2(cfg, spec):
    T = _window_of(cfg, spec).T_c2
    return math.nan if T is None else T


OBSERVABLES = {
    "omega_c": _obs_omega_c,
    "Omega_c": _obs_Omega_c,
    "Y": _obs_Y,
    "r_fc": _obs_r_fc,
    "phase": _obs_phase,
    "regime": _obs_regime,
    "Z": _obs_Z,
    "T_c1": _obs_T_c1,
    "T_c2": _obs_T_c2,
}

_UNITS = {
    "omega_c": "rad/s", "Omega_c": "rad/s", "Y": "J^2 (sign-bearing)",
    "r_fc": "m", "phase": "label", "regime": "label", "Z": "m^6",
    "T_c1": "K", "T_c2": "K",
}


def _validate(spec):
    if not isinstance(spec.base, MixtureConfig):
        raise ConfigError("scan base must be a MixtureConfig")
    if spec.observable not in OBSERVABLES:
        raise ConfigError(
            f"unknown observable '{spec.observable}'; expected one of "
            f"{sorted(OBSERVABLES)}")
    if len(spec.variables) not in (1, 2):
        raise ConfigError("a scan sweeps one or two fields")
    seen = set()
    for rng in spec.variables:
        if not isinstance(rng, ScanRange):
            raise ConfigError("scan variables must be ScanRange instances")
        if rng.field in seen:
            raise ConfigError(f"field '{rng.field}' swept twice")
        seen.add(rng.field)
    if spec.observable in ("T_c1", "T_c2"):
        if spec.t_range is None:
            raise ConfigError(
                "thermal.t_range is required for window observables")
        lo, hi = spec.t_range
        if not (0.0 < lo < hi):
            raise ConfigError(
                f"thermal.t_range must be increasing and positive, got "
                f"[{lo}, {hi}]")
    if spec.observable in ("Z", "T_c1", "T_c2") and spec.base.volume is None:
        raise ConfigError(
            "thermal.volume is required for finite-T observables")
    if spec.observable == "Z" and spec.base.temperature is None:
        if all(rng.field != "thermal.temperature" for rng in spec.variables):
            raise ConfigError(
                "the Z observable needs thermal.temperature, either set "
                "in the config or swept")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _point_config(spec, assignment):
    cfg = spec.base
    for rng, value in assignment:
        cfg = cfg.with_field(rng.field, spec.base.field_to_si(rng.field,
                                                              value))
    return cfg

def _evaluate_point(spec, assignment):
    try:
        cfg = _point_config(spec, assignment)
        value = OBSERVABLES[spec.observable](cfg, spec)
        return value, "OK"
    except (ConfigError, DomainError, NumericError) as exc:
        return math.nan, f"ERROR:{type(exc).__name__}"


def _temperature_extras(spec, assignment, value):
    """T in kelvin and T/T_F for a swept temperature axis."""
    T_K = spec.base.field_to_si("thermal.temperature", value)
    try:
        T_F = fermi_temperature(_point_config(spec, assignment))
        return [T_K, T_K / T_F]
    except (ConfigError, DomainError, NumericError):
        return [T_K, math.nan]


def run_scan(spec, workers=None):
    """Evaluate the observable over the full grid.

    workers <= 1 (or None) runs serially; larger counts evaluate points
    in a thread pool.  Both schedules produce identical tables: points
    share no state and rows are assembled by grid index.
    """
    _validate(spec)
    grids = [rng.grid() for rng in spec.variables]
    if len(grids) == 1:
        assignments = [((spec.variables[0], v),) for v in grids[0]]
    else:
        assignments = [((spec.variables[0], u), (spec.variables[1], v))
                       for u in grids[0] for v in grids[1]]

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda a: _evaluate_point(spec, a),
                                    assignments))
    else:
        results = [_evaluate_point(spec, a) for a in assignments]

    columns = []
    for rng in spec.variables:
        columns.append(_COLUMN_NAMES[rng.field])
        if rng.field == "thermal.temperature":
            columns.extend(["T_K", "T_over_TF"])
    columns.append(spec.observable)
    if spec.observable == "Y":
        columns.append("sign_Y")
    columns.append("status")

    rows = []
    for assignment, (value, status) in zip(assignments, results):
        row = []
        for rng, v in assignment:
            row.append(v)
            if rng.field == "thermal.temperature":
                row.extend(_temperature_extras(spec, assignment, v))
        row.append(value)
        if spec.observable == "Y":
            sign = math.nan if isinstance(value, float) and math.isnan(value) \
                else float(np.sign(value))
            row.append(sign)
        row.append(status)
        rows.append(tuple(row))

    return ScanTable(columns=tuple(columns), rows=tuple(rows),
                     provenance=_provenance(spec))


def config_lines(cfg):
    """Config echo lines shared by every CSV provenance block."""
    lines = [
        "config: "
        f"m_b={cfg.m_b:.17g} kg, m_f={cfg.m_f:.17g} kg, "
        f"omega_b={cfg.omega_b:.17g} rad/s, "
        f"omega_f={cfg.omega_f:.17g} rad/s, "
        f"N_b={cfg.N_b:.17g}, N_f={cfg.N_f:.17g}",
        "config: "
        f"g_bb={cfg.g_bb:.17g} J m^3, g_bf={cfg.g_bf:.17g} J m^3, "
        f"g_ff={cfg.g_ff:.17g} J m^3",
    ]
    if cfg.volume is not None or cfg.temperature is not None:
        vol = "unset" if cfg.volume is None else f"{cfg.volume:.17g} m^3"
        temp = ("unset" if cfg.temperature is None
                else f"{cfg.temperature:.17g} K")
        lines.append(f"config: volume={vol}, temperature={temp}")
    return lines


def _provenance(spec):
    cfg = spec.base
    lines = [f"bfmix {__version__}", f"mode: {cfg.compat_mode.value}"]
    if spec.preset:
        lines.append(f"preset: {spec.preset}")
    lines.append(f"observable: {spec.observable} "
                 f"[{_UNITS[spec.observable]}]")
    for rng in spec.variables:
        if rng.values is not None:
            desc = "values " + ", ".join(f"{v:g}" for v in rng.values)
        else:
            desc = (f"{rng.scale} grid [{rng.start:g}, {rng.stop:g}], "
                    f"{rng.points} points")
        lines.append(f"sweep: {rng.field} = {desc} (input units)")
    if spec.t_range is not None:
        lines.append(f"window scan range: thermal.t_range = "
                     f"[{spec.t_range[0]:g}, {spec.t_range[1]:g}] "
                     f"(input units)")
    if spec.caption_fixed:
        lines.append("fixed by figure definition: "
                     + "; ".join(spec.caption_fixed))
    if spec.reproduction:
        lines.append("reproduction choices: " + "; ".join(spec.reproduction))
    lines.extend(config_lines(cfg))
    return tuple(lines)


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

_SEVEN_U = 7.0 * atomic_mass
_OMEGA = 166.0  # rad/s, the quoted trap frequency read as angular

_MASS_NOTE = "m_b = m_f = 7 u"
_FREQ_NOTE = "frequencies read as angular rad/s"


def _preset_base(N_b, N_f, g_bb, g_bf, g_ff, volume=None, temperature=None):
    return MixtureConfig.from_oscillator(
        m_b=_SEVEN_U, m_f=_SEVEN_U, omega_b=_OMEGA, omega_f=_OMEGA,
        N_b=N_b, N_f=N_f, g_bb=g_bb, g_bf=g_bf, g_ff=g_ff,
        volume=volume, temperature=temperature,
        compat_mode=CompatMode.PAPER)


def _fig1():
    base = _preset_base(N_b=1000.0, N_f=100.0, g_bb=0.0, g_bf=0.0, g_ff=0.0)
    return ScanSpec(
        base=base,
        variables=(ScanRange("interaction.g_bb", 0.0, 0.12, 200),),
        observable="omega_c",
        preset="fig1",
        caption_fixed=("omega_b = 166 rad/s", "N_b = 1000"),
        reproduction=(_MASS_NOTE, _FREQ_NOTE,
                      "g_bb grid [0, 0.12] x 200",
                      "N_f = 100 (inert for omega_c)"))


def _fig2():
    base = _preset_base(N_b=1000.0, N_f=100.0, g_bb=0.05, g_bf=0.0,
                        g_ff=0.0)
    return ScanSpec(
        base=base,
        variables=(ScanRange("boson.count", values=(1000.0, 10000.0)),
                   ScanRange("interaction.g_bf", -0.2, 0.2, 200)),
        observable="Omega_c",
        preset="fig2",
        caption_fixed=("g_bb = 0.05 hbar omega_f a^3", "N_f = 100",
                       "omega_f = 166 rad/s"),
        reproduction=(_MASS_NOTE, _FREQ_NOTE,
                      "N_b in {1000, 10000} (caption leaves both unstated)",
                      "g_bf grid [-0.2, 0.2] x 200"))


def _fig3(tag, N_b):
    base = _preset_base(N_b=N_b, N_f=100.0, g_bb=0.05, g_bf=0.0, g_ff=0.0)
    return ScanSpec(
        base=base,
        variables=(ScanRange("interaction.g_bf", -0.05, 0.05, 200),),
        observable="Y",
        preset=tag,
        caption_fixed=(f"N_b = {N_b:g}", "N_f = 100"),
        reproduction=(_MASS_NOTE, _FREQ_NOTE,
                      "g_bb = 0.05 carried over from the frequency figure",
                      "g_bf grid [-0.05, 0.05] x 200",
                      "sign(Y) emitted alongside Y"))


def _fig4():
    base = _preset_base(N_b=1000.0, N_f=10000.0, g_bb=0.05, g_bf=0.0,
                        g_ff=0.01, volume=1000.0)
    return ScanSpec(
        base=base,
        variables=(ScanRange("interaction.g_bf", values=(0.3, 0.02, 0.01)),
                   ScanRange("thermal.temperature", 0.5, 50.0, 200,
                             scale="log")),
        observable="Z",
        preset="fig4",
        caption_fixed=("N_b = 1000", "N_f = 10000", "g_bb = 0.05",
                       "g_ff = 0.01", "g_bf in {0.3, 0.02, 0.01}"),
        reproduction=(_MASS_NOTE, _FREQ_NOTE,
                      "V = 1000 a^3",
                      "T grid [0.5, 50] hbar omega_f/k_B, 200 log points"))


def _fig5():
    base = _preset_base(N_b=1000.0, N_f=10000.0, g_bb=0.0, g_bf=0.2,
                        g_ff=0.0, volume=1000.0)
    T = 0.1 * fermi_temperature(base)
    base = base.with_field("thermal.temperature", T)
    return ScanSpec(
        base=base,
        variables=(ScanRange("interaction.g_bb", 0.0, 0.1, 100),
                   ScanRange("interaction.g_ff", 0.0, 0.1, 100)),
        observable="Z",
        preset="fig5",
        caption_fixed=("T = 0.1 T_F", "g_bf = 0.2"),
        reproduction=(_MASS_NOTE, _FREQ_NOTE,
                      "N_b = 1000, N_f = 10000 carried over",
                      "V = 1000 a^3",
                      "(g_bb, g_ff) grid [0, 0.1]^2 x 100x100"))


_PRESETS = {
    "fig1": _fig1,
    "fig2": _fig2,
    "fig3a": lambda: _fig3("fig3a", 1000.0),
    "fig3b": lambda: _fig3("fig3b", 10000.0),
    "fig4": _fig4,
    "fig5": _fig5,
}

PRESET_TAGS = tuple(sorted(_PRESETS))


def figure_preset(tag):
    """The fully populated ScanSpec behind one figure."""
    maker = _PRESETS.get(tag)
    if maker is None:
        raise ConfigError(
            f"unknown preset '{tag}'; expected one of {PRESET_TAGS}")
    return maker()


def scan_spec_from_dict(base, mapping):
    """Build a ScanSpec from the 'scan' section of a parsed config."""
    if not isinstance(mapping, dict):
        raise ConfigError("'scan' must be an object")
    unknown = set(mapping) - {"variables", "observable", "t_range"}
    if unknown:
        raise ConfigError(f"unknown scan keys: {sorted(unknown)}")
    observable = mapping.get("observable")
    if not isinstance(observable, str):
        raise ConfigError("scan.observable must be a string")
    raw_vars = mapping.get("variables")
    if not isinstance(raw_vars, list) or not 1 <= len(raw_vars) <= 2:
        raise ConfigError("scan.variables must be a list of one or two "
                          "entries")
    variables = []
    for entry in raw_vars:
        if not isinstance(entry, dict):
            raise ConfigError("each scan variable must be an object")
        unknown = set(entry) - {"field", "from", "to", "points", "scale",
                                "values"}
        if unknown:
            raise ConfigError(
                f"unknown scan variable keys: {sorted(unknown)}")
        variables.append(ScanRange(
            field=entry.get("field"),
            start=entry.get("from"),
            stop=entry.get("to"),
            points=entry.get("points"),
            scale=entry.get("scale", "linear"),
            values=(tuple(entry["values"]) if "values" in entry
                    else None)))
    t_range = mapping.get("t_range")
    if t_range is not None:
        if (not isinstance(t_range, list) or len(t_range) != 2):
            raise ConfigError("scan.t_range must be a two-element list")
        t_range = (float(t_range[0]), float(t_range[1]))
    spec = ScanSpec(base=base, variables=tuple(variables),
                    observable=observable, t_range=t_range)
    _validate(spec)
    return spec
