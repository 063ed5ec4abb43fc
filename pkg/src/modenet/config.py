"""YAML configuration documents for the command-line tool.

Every rate and frequency in a document is ordinary frequency in Hz
(keys end in ``_hz``); values are converted to angular units here, at
parse time.  Unknown keys anywhere are rejected.

Example::

    network:
      preset: isolator
      kappa_hz: [2.0e5, 3.4e6]
      gamma_m_hz: [30, 10]
      delta_hz: 18000
      phi_rad: -0.6283
      cooperativities: [520, 450, 1350, 1280]
      cross_damping_hz: {b1: 20000}
    sweep: {omega_min_hz: -2000, omega_max_hz: 2000, points: 401}
    occupations: {b1: 800, b2: 800}
    output: {path: out.csv, precision: 12}
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import yaml

from . import isolator
from .circulator import design as circulator_design, direction_phases
from .errors import ConfigError, ModenetError
from .model import (
    CavityMode,
    Coupling,
    MechanicalMode,
    NetworkSpec,
    apply_cross_damping,
    circulator_beta,
    circulator_preset,
    coupling_for_cooperativity,
    isolator_preset,
    to_angular,
)

DEFAULT_PRECISION = 12

TOP_KEYS = {"network", "sweep", "occupations", "output", "design"}
ISOLATOR_KEYS = {
    "preset", "kappa_hz", "kappa_ext_hz", "gamma_m_hz", "delta_hz", "phi_rad",
    "cooperativities", "g_hz", "cross_damping_hz", "direction",
}
CIRCULATOR_KEYS = {
    "preset", "kappa_hz", "kappa_ext_hz", "gamma_m_hz", "beta", "cooperativity",
    "direction", "phases_rad",
}
EXPLICIT_KEYS = {"cavities", "mechanicals", "couplings"}
CAVITY_KEYS = {"label", "kappa_ext_hz", "kappa_int_hz", "bath_occupation"}
MECH_KEYS = {"label", "gamma_m_hz", "frame_detuning_hz", "thermal_occupation"}
COUPLING_KEYS = {"cavity", "mechanical", "g_hz", "phase_rad"}
SWEEP_KEYS = {"omega_min_hz", "omega_max_hz", "points", "scale"}
OUTPUT_KEYS = {"path", "precision"}
DESIGN_ISOLATOR_KEYS = {
    "kind", "gamma_m_hz", "delta_hz", "cooperativity", "kappa_hz", "kappa_ext_hz",
    "direction", "occupations",
}
DESIGN_CIRCULATOR_KEYS = {
    "kind", "beta", "cooperativity", "gamma_m_hz", "kappa_hz", "kappa_ext_hz",
    "direction", "occupations",
}


@dataclass(frozen=True)
class SweepSpec:
    omega_min: float
    omega_max: float
    points: int
    scale: str = "linear"

    def omegas(self) -> np.ndarray:
        """Angular frequency grid."""
        if self.scale == "log":
            return np.geomspace(self.omega_min, self.omega_max, self.points)
        return np.linspace(self.omega_min, self.omega_max, self.points)


@dataclass(frozen=True)
class DesignRequest:
    kind: str
    params: dict


@dataclass(frozen=True)
class Config:
    """Parsed configuration, angular units throughout.

    ``preset`` records which builder produced ``network`` and
    ``preset_info`` the solved design quantities the check command needs.
    """

    network: NetworkSpec | None = None
    preset: str = "explicit"
    preset_info: dict = field(default_factory=dict)
    sweep: SweepSpec | None = None
    occupations: dict | None = None
    output_path: str | None = None
    precision: int = DEFAULT_PRECISION
    design: DesignRequest | None = None


def _check_keys(section: Any, allowed: set[str], where: str) -> dict:
    if not isinstance(section, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(section).__name__}")
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {unknown}; allowed {sorted(allowed)}")
    return section


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return section[key]


def _number(value, where: str) -> float:
    # YAML 1.1 loads exponents without a sign (2.0e5) as strings
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(f"{where}: expected a number, got {value!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}: value must be finite")
    return float(value)


def _numbers(value, n: int, where: str) -> list[float]:
    if not isinstance(value, list) or len(value) != n:
        raise ConfigError(f"{where}: expected a list of {n} numbers, got {value!r}")
    return [_number(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _angular(value, n: int, where: str) -> list[float]:
    return [to_angular(v) for v in _numbers(value, n, where)]


def _occupation_map(section, where: str) -> dict:
    section = _check_keys(section, set(section) if isinstance(section, dict) else set(), where)
    return {str(k): _number(v, f"{where}.{k}") for k, v in section.items()}


def _isolator_network(sec: dict) -> tuple[NetworkSpec, dict]:
    where = "network"
    _check_keys(sec, ISOLATOR_KEYS, where)
    kappas = _angular(_require(sec, "kappa_hz", where), 2, "network.kappa_hz")
    kext = _angular(sec["kappa_ext_hz"], 2, "network.kappa_ext_hz") if "kappa_ext_hz" in sec else None
    gammas = _angular(_require(sec, "gamma_m_hz", where), 2, "network.gamma_m_hz")
    delta = to_angular(_number(_require(sec, "delta_hz", where), "network.delta_hz"))
    direction = sec.get("direction", "forward")
    if direction not in ("forward", "backward"):
        raise ConfigError(f"network.direction: expected forward|backward, got {direction!r}")
    gamma_plus = 0.5 * (gammas[0] + gammas[1])
    phi = sec.get("phi_rad", "auto")
    auto_phi = phi == "auto"
    phi = isolator.isolation_phase(gamma_plus, delta, direction) if auto_phi else _number(phi, "network.phi_rad")
    if "g_hz" in sec and "cooperativities" in sec:
        raise ConfigError("network: give either g_hz or cooperativities, not both")
    if "g_hz" in sec:
        couplings = _angular(sec["g_hz"], 4, "network.g_hz")
        auto_c = False
    else:
        cs = sec.get("cooperativities", "auto")
        auto_c = cs == "auto"
        if auto_c:
            cs = [isolator.optimal_cooperativity(gamma_plus, delta)] * 4
        else:
            cs = _numbers(cs, 4, "network.cooperativities")
        # (C11, C21, C12, C22): cavity index first, mechanical second
        pairs = [(0, 0), (1, 0), (0, 1), (1, 1)]
        couplings = [coupling_for_cooperativity(c, kappas[i], gammas[j]) for c, (i, j) in zip(cs, pairs)]
    net = isolator_preset(kappas, gammas, couplings, delta, phi, kappa_ext=kext)
    cross = sec.get("cross_damping_hz", {})
    for label, value in _check_keys(cross, {"b1", "b2"}, "network.cross_damping_hz").items():
        net = apply_cross_damping(net, label, to_angular(_number(value, f"network.cross_damping_hz.{label}")))
    info = {"phi": phi, "delta": delta, "design_point": auto_phi and auto_c and not cross, "direction": direction}
    return net, info


def _circulator_network(sec: dict) -> tuple[NetworkSpec, dict]:
    where = "network"
    _check_keys(sec, CIRCULATOR_KEYS, where)
    kappas = _angular(_require(sec, "kappa_hz", where), 3, "network.kappa_hz")
    kext = _angular(sec["kappa_ext_hz"], 3, "network.kappa_ext_hz") if "kappa_ext_hz" in sec else None
    gammas = _angular(_require(sec, "gamma_m_hz", where), 2, "network.gamma_m_hz")
    beta = _circulator_beta(sec, where)
    direction = sec.get("direction", "counter_clockwise")
    if direction not in ("counter_clockwise", "clockwise"):
        raise ConfigError(f"network.direction: expected counter_clockwise|clockwise, got {direction!r}")
    if "phases_rad" in sec:
        phases = _numbers(sec["phases_rad"], 3, "network.phases_rad")
        net = circulator_preset(kappas, gammas, beta, phases=phases, kappa_ext=kext)
    else:
        _, net = circulator_design(beta, gammas, kappas, direction, kappa_ext=kext)
        phases = list(direction_phases(direction))
    return net, {"beta": beta, "direction": direction, "phases": phases}


def _circulator_beta(sec: dict, where: str) -> float:
    if ("beta" in sec) == ("cooperativity" in sec):
        raise ConfigError(f"{where}: give exactly one of beta or cooperativity")
    if "beta" in sec:
        return _number(sec["beta"], f"{where}.beta")
    return circulator_beta(_number(sec["cooperativity"], f"{where}.cooperativity"))


def _explicit_network(sec: dict) -> NetworkSpec:
    _check_keys(sec, EXPLICIT_KEYS, "network")
    cavities, mechanicals, couplings = [], [], []
    for k, c in enumerate(sec.get("cavities", [])):
        w = f"network.cavities[{k}]"
        _check_keys(c, CAVITY_KEYS, w)
        cavities.append(
            CavityMode(
                str(_require(c, "label", w)),
                kappa_ext=to_angular(_number(c.get("kappa_ext_hz", 0.0), w + ".kappa_ext_hz")),
                kappa_int=to_angular(_number(c.get("kappa_int_hz", 0.0), w + ".kappa_int_hz")),
                bath_occupation=_number(c.get("bath_occupation", 0.0), w + ".bath_occupation"),
            )
        )
    for k, m in enumerate(sec.get("mechanicals", [])):
        w = f"network.mechanicals[{k}]"
        _check_keys(m, MECH_KEYS, w)
        mechanicals.append(
            MechanicalMode(
                str(_require(m, "label", w)),
                gamma_m=to_angular(_number(_require(m, "gamma_m_hz", w), w + ".gamma_m_hz")),
                frame_detuning=to_angular(_number(m.get("frame_detuning_hz", 0.0), w + ".frame_detuning_hz")),
                thermal_occupation=_number(m.get("thermal_occupation", 0.0), w + ".thermal_occupation"),
            )
        )
    for k, g in enumerate(sec.get("couplings", [])):
        w = f"network.couplings[{k}]"
        _check_keys(g, COUPLING_KEYS, w)
        couplings.append(
            Coupling(
                str(_require(g, "cavity", w)),
                str(_require(g, "mechanical", w)),
                to_angular(_number(_require(g, "g_hz", w), w + ".g_hz")),
                _number(g.get("phase_rad", 0.0), w + ".phase_rad"),
            )
        )
    return NetworkSpec(tuple(cavities), tuple(mechanicals), tuple(couplings))


def _sweep(sec) -> SweepSpec:
    _check_keys(sec, SWEEP_KEYS, "sweep")
    lo = to_angular(_number(_require(sec, "omega_min_hz", "sweep"), "sweep.omega_min_hz"))
    hi = to_angular(_number(_require(sec, "omega_max_hz", "sweep"), "sweep.omega_max_hz"))
    points = _require(sec, "points", "sweep")
    if isinstance(points, bool) or not isinstance(points, int) or points < 1:
        raise ConfigError(f"sweep.points: expected a positive integer, got {points!r}")
    scale = sec.get("scale", "linear")
    if scale not in ("linear", "log"):
        raise ConfigError(f"sweep.scale: expected linear|log, got {scale!r}")
    if hi < lo:
        raise ConfigError("sweep: omega_max_hz must be >= omega_min_hz")
    if scale == "log" and lo <= 0:
        raise ConfigError("sweep: log scale needs omega_min_hz > 0")
    return SweepSpec(lo, hi, points, scale)


def _design(sec) -> DesignRequest:
    if not isinstance(sec, dict):
        raise ConfigError("design: expected a mapping")
    kind = _require(sec, "kind", "design")
    if kind == "isolator":
        _check_keys(sec, DESIGN_ISOLATOR_KEYS, "design")
        p = {
            "gamma_m": to_angular(_number(_require(sec, "gamma_m_hz", "design"), "design.gamma_m_hz")),
            "direction": sec.get("direction", "forward"),
        }
        if ("delta_hz" in sec) == ("cooperativity" in sec):
            raise ConfigError("design: give exactly one of delta_hz or cooperativity")
        if "delta_hz" in sec:
            p["delta"] = to_angular(_number(sec["delta_hz"], "design.delta_hz"))
        else:
            p["cooperativity"] = _number(sec["cooperativity"], "design.cooperativity")
        n = 2
    elif kind == "circulator":
        _check_keys(sec, DESIGN_CIRCULATOR_KEYS, "design")
        p = {
            "beta": _circulator_beta(sec, "design"),
            "gammas": _angular(_require(sec, "gamma_m_hz", "design"), 2, "design.gamma_m_hz"),
            "direction": sec.get("direction", "counter_clockwise"),
        }
        n = 3
    else:
        raise ConfigError(f"design.kind: expected isolator|circulator, got {kind!r}")
    if "kappa_hz" in sec:
        p["kappas"] = _angular(sec["kappa_hz"], n, "design.kappa_hz")
    if "kappa_ext_hz" in sec:
        p["kappa_ext"] = _angular(sec["kappa_ext_hz"], n, "design.kappa_ext_hz")
    p["occupations"] = _numbers(sec.get("occupations", [0.0, 0.0]), 2, "design.occupations")
    return DesignRequest(kind, p)


def parse_config(doc: Any) -> Config:
    """Build a :class:`Config` from an already-loaded YAML document.

    Raises :class:`ConfigError` for malformed documents.  Physics errors
    raised while building the network (including infeasible designs)
    propagate unchanged.
    """
    if doc is None:
        doc = {}
    _check_keys(doc, TOP_KEYS, "config")
    network, preset, info = None, "explicit", {}
    if "network" in doc:
        sec = doc["network"]
        if not isinstance(sec, dict):
            raise ConfigError("network: expected a mapping")
        preset = sec.get("preset", "explicit")
        if preset == "isolator":
            network, info = _isolator_network(sec)
        elif preset == "circulator":
            network, info = _circulator_network(sec)
        elif preset == "explicit" and "preset" not in sec:
            network = _explicit_network(sec)
        else:
            raise ConfigError(f"network.preset: expected isolator|circulator, got {preset!r}")
    occupations = _occupation_map(doc["occupations"], "occupations") if "occupations" in doc else None
    out = _check_keys(doc.get("output", {}), OUTPUT_KEYS, "output")
    precision = out.get("precision", DEFAULT_PRECISION)
    if isinstance(precision, bool) or not isinstance(precision, int) or not 1 <= precision <= 17:
        raise ConfigError(f"output.precision: expected an integer in [1, 17], got {precision!r}")
    path = out.get("path")
    return Config(
        network=network,
        preset=preset,
        preset_info=info,
        sweep=_sweep(doc["sweep"]) if "sweep" in doc else None,
        occupations=occupations,
        output_path=None if path is None else str(path),
        precision=precision,
        design=_design(doc["design"]) if "design" in doc else None,
    )


def load_config(path: str) -> Config:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    try:
        return parse_config(doc)
    except ModenetError:
        raise
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
