"""TOML run-configuration parsing.

Config files are human-edited, so the parser is strict: unknown keys
and sections are rejected, required keys are named in the error, and
every key carries its unit in its name (``f_pump_ghz``, ``z_odd_ohm``,
``c_shunt_pf``).  Frequencies are cyclic GHz in the file and are
converted to angular rad/s here, exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .gain import AmplifierConfig
from .network import (
    CoupledLineSpec,
    EnvironmentChain,
    RuthroffTransformer,
    SeriesCapacitor,
    SeriesInductor,
    SeriesTunedReactance,
    ShuntCapacitor,
    TransmissionLine,
)
from .optimizer import Objective, ParameterSpace
from .pumpistor import OperatingPoint, SquidSpec
from .quantities import to_angular

GHZ = 1.0e9

TOP_LEVEL_SECTIONS = (
    "squid", "operating_point", "environment", "sweep", "noise", "optimize",
)

# Unit-suffixed config key -> (canonical parameter name, scale to SI).
# Frequencies additionally go through to_angular.
PARAM_KEYS = {
    "z_oo_ohm": ("z_oo", 1.0, False),
    "reactance_slope_nh": ("reactance_slope", 1.0e-9, False),
    "phi_dc_over_phi0": ("phi_dc_over_phi0", 1.0, False),
    "phi_ac_over_phi0": ("phi_ac_over_phi0", 1.0, False),
    "f_pump_ghz": ("omega_p", GHZ, True),
    "c_shunt_pf": ("shunt_c", 1.0e-12, False),
}


def _section(table: dict, name: str) -> dict:
    sect = table.get(name)
    if sect is None:
        raise ConfigError("missing required section [%s]" % name)
    if not isinstance(sect, dict):
        raise ConfigError("[%s] must be a table" % name)
    return sect


def _take(sect: dict, section_name: str, key: str, *, required: bool = True,
          default=None):
    if key not in sect:
        if required:
            raise ConfigError(
                "missing required key %r in [%s]" % (key, section_name))
        return default
    return sect[key]


def _number(sect: dict, section_name: str, key: str, *, required: bool = True,
            default=None):
    value = _take(sect, section_name, key, required=required, default=None)
    if value is None:
        return default
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("key %r in [%s] must be a number"
                          % (key, section_name))
    return float(value)


def _check_known(sect: dict, section_name: str, known: tuple) -> None:
    unknown = set(sect) - set(known)
    if unknown:
        raise ConfigError(
            "unknown key %r in [%s] (known keys: %s)"
            % (sorted(unknown)[0], section_name, ", ".join(sorted(known)))
        )


def load_config(path) -> dict:
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigError("config file not found: %s" % path) from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("invalid TOML in %s: %s" % (path, exc)) from None
    unknown = set(raw) - set(TOP_LEVEL_SECTIONS)
    if unknown:
        raise ConfigError(
            "unknown section [%s] (known sections: %s)"
            % (sorted(unknown)[0], ", ".join(TOP_LEVEL_SECTIONS))
        )
    return raw


def build_squid(raw: dict) -> SquidSpec:
    sect = _section(raw, "squid")
    _check_known(sect, "squid", ("critical_current_ua", "l_j_ph",
                                 "c_shunt_pf"))
    c = _number(sect, "squid", "c_shunt_pf") * 1.0e-12
    has_ic = "critical_current_ua" in sect
    has_lj = "l_j_ph" in sect
    if has_ic == has_lj:
        raise ConfigError(
            "[squid] needs exactly one of 'critical_current_ua' or 'l_j_ph'")
    if has_ic:
        ic = _number(sect, "squid", "critical_current_ua") * 1.0e-6
        return SquidSpec(critical_current=ic, shunt_capacitance=c)
    lj = _number(sect, "squid", "l_j_ph") * 1.0e-12
    return SquidSpec.from_inductance(lj, c)


def build_operating_point(raw: dict) -> OperatingPoint:
    sect = _section(raw, "operating_point")
    _check_known(sect, "operating_point",
                 ("phi_dc_over_phi0", "phi_ac_over_phi0", "f_pump_ghz"))
    return OperatingPoint.from_flux_fractions(
        _number(sect, "operating_point", "phi_dc_over_phi0"),
        _number(sect, "operating_point", "phi_ac_over_phi0"),
        to_angular(_number(sect, "operating_point", "f_pump_ghz") * GHZ),
    )


def build_transformer(raw: dict, z_high: float) -> CoupledLineSpec:
    env = _section(raw, "environment")
    if "transformer" not in env:
        raise ConfigError(
            "missing required section [environment.transformer]")
    sect = env["transformer"]
    _check_known(sect, "environment.transformer",
                 ("z_odd_ohm", "z_even_ohm", "length_mm",
                  "odd_mode_velocity_m_per_s"))
    name = "environment.transformer"
    return CoupledLineSpec(
        z_odd=_number(sect, name, "z_odd_ohm"),
        z_even=_number(sect, name, "z_even_ohm"),
        length=_number(sect, name, "length_mm") * 1.0e-3,
        odd_mode_velocity=_number(sect, name, "odd_mode_velocity_m_per_s"),
        z_high=z_high,
    )


_ELEMENT_KEYS = {
    "transmission_line": ("z0_ohm", "length_mm", "velocity_m_per_s"),
    "series_inductor": ("l_nh",),
    "series_capacitor": ("c_pf",),
    "shunt_capacitor": ("c_pf",),
    "series_tuned_reactance": ("slope_nh", "f_center_ghz"),
}


def _build_element(sect: dict, index: int):
    name = "environment.elements[%d]" % index
    kind = _take(sect, name, "kind")
    if kind not in _ELEMENT_KEYS:
        raise ConfigError(
            "unknown element kind %r in [%s] (known kinds: %s)"
            % (kind, name, ", ".join(sorted(_ELEMENT_KEYS)))
        )
    _check_known(sect, name, ("kind",) + _ELEMENT_KEYS[kind])
    if kind == "transmission_line":
        return TransmissionLine(
            z0=_number(sect, name, "z0_ohm"),
            length=_number(sect, name, "length_mm") * 1.0e-3,
            velocity=_number(sect, name, "velocity_m_per_s"),
        )
    if kind == "series_inductor":
        return SeriesInductor(_number(sect, name, "l_nh") * 1.0e-9)
    if kind == "series_capacitor":
        return SeriesCapacitor(_number(sect, name, "c_pf") * 1.0e-12)
    if kind == "shunt_capacitor":
        return ShuntCapacitor(_number(sect, name, "c_pf") * 1.0e-12)
    return SeriesTunedReactance(
        slope=_number(sect, name, "slope_nh") * 1.0e-9,
        center_omega=to_angular(_number(sect, name, "f_center_ghz") * GHZ),
    )


def build_environment(raw: dict, squid: SquidSpec) -> EnvironmentChain:
    sect = _section(raw, "environment")
    _check_known(sect, "environment",
                 ("source_impedance_ohm", "transformer", "elements"))
    z0 = _number(sect, "environment", "source_impedance_ohm",
                 required=False, default=50.0)
    elements = []
    if "transformer" in sect:
        elements.append(RuthroffTransformer(build_transformer(raw, z0)))
    extra = sect.get("elements", [])
    if not isinstance(extra, list):
        raise ConfigError("[environment] 'elements' must be an array of "
                          "tables ([[environment.elements]])")
    for i, el in enumerate(extra):
        elements.append(_build_element(el, i))
    return EnvironmentChain(
        source_impedance=z0,
        elements=tuple(elements),
        shunt_capacitance=squid.shunt_capacitance,
    )


def build_amplifier(raw: dict) -> AmplifierConfig:
    """Assemble the full amplifier; the single SQUID shunt capacitance
    from [squid] is shared with the environment."""
    squid = build_squid(raw)
    return AmplifierConfig(
        squid=squid,
        operating_point=build_operating_point(raw),
        environment=build_environment(raw, squid),
    )


@dataclass(frozen=True)
class SweepSettings:
    """Resolved [sweep] section: grid, metric level, and ripple band."""

    omega_grid: np.ndarray
    level_db: float
    band: tuple | None
    param: str | None
    param_values: tuple | None


def _param_from_key(key: str, context: str):
    if key not in PARAM_KEYS:
        raise ConfigError(
            "unknown parameter key %r in [%s] (known keys: %s)"
            % (key, context, ", ".join(sorted(PARAM_KEYS)))
        )
    return PARAM_KEYS[key]


def build_sweep_settings(raw: dict) -> SweepSettings:
    sect = _section(raw, "sweep")
    _check_known(sect, "sweep",
                 ("f_min_ghz", "f_max_ghz", "points", "level_db",
                  "band_f_min_ghz", "band_f_max_ghz", "grid"))
    f_min = _number(sect, "sweep", "f_min_ghz")
    f_max = _number(sect, "sweep", "f_max_ghz")
    points = _take(sect, "sweep", "points")
    if not isinstance(points, int) or isinstance(points, bool) or points < 1:
        raise ConfigError("key 'points' in [sweep] must be a positive "
                          "integer")
    if not 0 < f_min < f_max:
        raise ConfigError("[sweep] needs 0 < f_min_ghz < f_max_ghz")
    omega = to_angular(np.linspace(f_min * GHZ, f_max * GHZ, points))

    level_db = _number(sect, "sweep", "level_db", required=False,
                       default=None)
    band_lo = _number(sect, "sweep", "band_f_min_ghz", required=False,
                      default=None)
    band_hi = _number(sect, "sweep", "band_f_max_ghz", required=False,
                      default=None)
    if (band_lo is None) != (band_hi is None):
        raise ConfigError("[sweep] band needs both 'band_f_min_ghz' and "
                          "'band_f_max_ghz'")
    band = None
    if band_lo is not None:
        if not 0 < band_lo < band_hi:
            raise ConfigError("[sweep] band must satisfy 0 < band_f_min_ghz "
                              "< band_f_max_ghz")
        band = (to_angular(band_lo * GHZ), to_angular(band_hi * GHZ))

    param = None
    values = None
    if "grid" in sect:
        gsect = sect["grid"]
        if not isinstance(gsect, dict) or len(gsect) != 1:
            raise ConfigError("[sweep.grid] must contain exactly one "
                              "parameter key")
        key, entries = next(iter(gsect.items()))
        param, scale, is_freq = _param_from_key(key, "sweep.grid")
        if not isinstance(entries, list) or not entries:
            raise ConfigError("key %r in [sweep.grid] must be a non-empty "
                              "array" % key)
        out = []
        for v in entries:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError("values for %r in [sweep.grid] must be "
                                  "numbers" % key)
            si = float(v) * scale
            out.append(to_angular(si) if is_freq else si)
        values = tuple(out)

    return SweepSettings(omega, level_db, band, param, values)


@dataclass(frozen=True)
class OptimizeSettings:
    objective: Objective
    space: ParameterSpace
    budget: int
    mode: str
    points_per_axis: int


def build_optimize_settings(raw: dict,
                            sweep: SweepSettings) -> OptimizeSettings:
    sect = _section(raw, "optimize")
    _check_known(sect, "optimize",
                 ("target_gain_db", "ripple_limit_db", "budget", "mode",
                  "points_per_axis", "space"))
    target = _number(sect, "optimize", "target_gain_db")
    ripple = _number(sect, "optimize", "ripple_limit_db", required=False,
                     default=1.0)
    budget = _take(sect, "optimize", "budget", required=False, default=500)
    if not isinstance(budget, int) or isinstance(budget, bool) or budget < 10:
        raise ConfigError("key 'budget' in [optimize] must be an integer "
                          ">= 10")
    mode = _take(sect, "optimize", "mode", required=False,
                 default="nelder-mead")
    if mode not in ("nelder-mead", "grid"):
        raise ConfigError("key 'mode' in [optimize] must be 'nelder-mead' "
                          "or 'grid'")
    ppa = _take(sect, "optimize", "points_per_axis", required=False,
                default=33)
    if not isinstance(ppa, int) or isinstance(ppa, bool) or ppa < 2:
        raise ConfigError("key 'points_per_axis' in [optimize] must be an "
                          "integer >= 2")

    if sweep.band is None:
        raise ConfigError("[optimize] needs the ripple band: set "
                          "'band_f_min_ghz'/'band_f_max_ghz' in [sweep]")
    objective = Objective(target_gain_db=target, band=sweep.band,
                          omega_grid=sweep.omega_grid,
                          ripple_limit_db=ripple)

    ssect = _take(sect, "optimize", "space")
    if not isinstance(ssect, dict) or not ssect:
        raise ConfigError("[optimize.space] must map parameter keys to "
                          "[lower, upper] bounds")
    bounds = {}
    for key, pair in ssect.items():
        param, scale, is_freq = _param_from_key(key, "optimize.space")
        if (not isinstance(pair, list) or len(pair) != 2
                or any(isinstance(v, bool) or not isinstance(v, (int, float))
                       for v in pair)):
            raise ConfigError("bounds for %r in [optimize.space] must be "
                              "[lower, upper]" % key)
        lo, hi = (float(v) * scale for v in pair)
        if is_freq:
            lo, hi = to_angular(lo), to_angular(hi)
        bounds[param] = (lo, hi)
    return OptimizeSettings(objective, ParameterSpace(bounds), budget, mode,
                            ppa)


def build_noise_frequency(raw: dict) -> float:
    """Angular signal frequency for a noise fit, from [noise]."""
    sect = _section(raw, "noise")
    _check_known(sect, "noise", ("f_signal_ghz",))
    return to_angular(_number(sect, "noise", "f_signal_ghz") * GHZ)
