"""TOML configuration loading.

A configuration file describes one device and operating point. The
required sections are [optical], [mechanical], [microwave], [pump],
[budget] and [noise]; [heating], [herald], [circuit], [spectra] and
[calib] are optional extras consumed by the command line tools. All
frequency-like fields carry a _hz suffix and are converted to rad/s
here, never inside the physics code.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .constants import TWO_PI
from .errors import ConfigError
from .model import (
    EfficiencyBudget,
    MechanicalMode,
    MicrowaveMode,
    NoiseBudget,
    OpticalMode,
    PumpConfig,
    TransducerParams,
)

BUNDLED_CONFIG_NAME = "device.toml"


@dataclass(frozen=True)
class FullConfig:
    """Parsed configuration: physics bundle plus the optional CLI sections."""

    params: TransducerParams
    heating: dict[str, float]
    herald: dict[str, float]
    circuit: dict[str, float]
    spectra: dict[str, float]
    calib: dict[str, float]
    source: str


def bundled_config_path() -> Path:
    """Filesystem path of the configuration shipped with the package."""
    return Path(resources.files("transducersim.data") / BUNDLED_CONFIG_NAME)


def _section(raw: dict[str, Any], name: str) -> dict[str, Any]:
    if name not in raw:
        raise ConfigError(f"missing [{name}] section")
    sec = raw[name]
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    return sec


def _get(sec: dict[str, Any], section: str, key: str, default: Any = ...) -> Any:
    if key in sec:
        return sec[key]
    if default is ...:
        raise ConfigError(f"[{section}] {key}: missing required field")
    return default


def _num(sec: dict[str, Any], section: str, key: str, default: Any = ...) -> float:
    v = _get(sec, section, key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"[{section}] {key}: expected a number, got {v!r}")
    return float(v)


def load_config(path: str | Path | None = None) -> FullConfig:
    """Load a device configuration, defaulting to the bundled one."""
    if path is None:
        src = bundled_config_path()
    else:
        src = Path(path)
    try:
        with open(src, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {src}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file is not valid TOML: {exc}") from exc

    opt = _section(raw, "optical")
    optical = OpticalMode.from_hz(
        omega_hz=_num(opt, "optical", "omega_hz"),
        kappa_hz=_num(opt, "optical", "kappa_hz"),
        kappa_ext_hz=_num(opt, "optical", "kappa_ext_hz"),
        g0_hz=_num(opt, "optical", "g0_hz"),
    )

    mech = _section(raw, "mechanical")
    mechanical = MechanicalMode.from_hz(
        omega_hz=_num(mech, "mechanical", "omega_hz"),
        gamma_i_pump_on_hz=_num(mech, "mechanical", "gamma_i_pump_on_hz"),
        gamma_i_pump_off_hz=_num(mech, "mechanical", "gamma_i_pump_off_hz"),
        jitter_rms_hz=_num(mech, "mechanical", "jitter_rms_hz", 0.0),
    )

    mw = _section(raw, "microwave")
    microwave = MicrowaveMode.from_hz(
        omega_hz=_num(mw, "microwave", "omega_hz"),
        kappa_hz=_num(mw, "microwave", "kappa_hz"),
        kappa_ext_hz=_num(mw, "microwave", "kappa_ext_hz"),
        g_hz=_num(mw, "microwave", "g_hz"),
    )

    pmp = _section(raw, "pump")
    detuning = _get(pmp, "pump", "detuning")
    if not isinstance(detuning, str):
        raise ConfigError(f"[pump] detuning: expected a string, got {detuning!r}")
    pump = PumpConfig(
        detuning=detuning,
        n_photons=_num(pmp, "pump", "n_photons"),
        tau=_num(pmp, "pump", "tau_s"),
        rep_rate=_num(pmp, "pump", "rep_rate_hz"),
    )

    bud = _section(raw, "budget")
    budget = EfficiencyBudget(
        eta_o=optical.eta,
        eta_mu=microwave.eta,
        eta_in_fridge=_num(bud, "budget", "eta_in_fridge"),
        eta_filters=_num(bud, "budget", "eta_filters"),
        eta_spd=_num(bud, "budget", "eta_spd"),
        eta_circ=_num(bud, "budget", "eta_circ"),
        eta_spd_path=_num(bud, "budget", "eta_spd_path") if "eta_spd_path" in bud else None,
        eta_d=_num(bud, "budget", "eta_d", 1.0),
        eta_mum=_num(bud, "budget", "eta_mum", 1.0),
        eta_herald=_num(bud, "budget", "eta_herald", 1.0),
    )

    noi = _section(raw, "noise")
    noise = NoiseBudget(
        n_th=_num(noi, "noise", "n_th"),
        n_n=_num(noi, "noise", "n_n"),
        n_m=_num(noi, "noise", "n_m"),
        n_ex=_num(noi, "noise", "n_ex"),
        dark_rate=_num(noi, "noise", "dark_rate_hz", 0.0),
    )

    params = TransducerParams(
        optical=optical, mechanical=mechanical, microwave=microwave,
        pump=pump, budget=budget, noise=noise,
    )

    heating_raw = raw.get("heating", {})
    heating = {
        "n_bath_peak": _num(heating_raw, "heating", "n_bath_peak", 0.0),
        "decay_rate": TWO_PI * _num(heating_raw, "heating", "decay_rate_hz", 0.0),
        "t0": _num(heating_raw, "heating", "t0_s", 0.0),
    }

    herald_raw = raw.get("herald", {})
    herald = {
        "p_pair": _num(herald_raw, "herald", "p_pair", 0.036),
        "eta_sys": _num(herald_raw, "herald", "eta_sys", 0.01),
        "dark_prob": _num(herald_raw, "herald", "dark_prob", 0.0),
        "n_th": _num(herald_raw, "herald", "n_th", noise.n_th),
        "n_ex": _num(herald_raw, "herald", "n_ex", noise.n_ex),
        "gain_scale": _num(herald_raw, "herald", "gain_scale", 1.0),
    }

    circuit_raw = raw.get("circuit", {})
    circuit = {k: _num(circuit_raw, "circuit", k)
               for k in circuit_raw} if circuit_raw else {}

    spectra_raw = raw.get("spectra", {})
    spectra = {
        "span_hz": _num(spectra_raw, "spectra", "span_hz", 30e6),
        "points": int(_num(spectra_raw, "spectra", "points", 2001)),
    }

    calib_raw = raw.get("calib", {})
    calib = {k: _num(calib_raw, "calib", k) for k in calib_raw} if calib_raw else {}

    return FullConfig(
        params=params, heating=heating, herald=herald, circuit=circuit,
        spectra=spectra, calib=calib, source=str(src),
    )
