"""Command-line entry point: ``modenet sweep|noise|design|check --config PATH``.

Exit codes: 0 success, 1 failed invariant, 2 configuration error,
3 numeric failure, 4 infeasible design.
"""

from __future__ import annotations

import argparse
import io
import sys

import numpy as np

from . import circulator, dynamics, isolator, noisespec
from .config import Config, load_config
from .errors import (
    ConfigError,
    DesignInfeasibleError,
    InvalidParameterError,
    ModenetError,
    NoFiniteSolutionError,
    NotFoundError,
    OracleFailure,
)
from .model import NetworkSpec, to_hz

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_NUMERIC, EXIT_INFEASIBLE = 0, 1, 2, 3, 4

DB_CAP = 200.0
UNITARITY_TOL = 1e-10
ORACLE_TOL = 1e-4


def _fmt(x: float, precision: int) -> str:
    return f"{x:.{precision}g}"


def _mag2_db(s: np.ndarray) -> np.ndarray:
    p = np.abs(s) ** 2
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(p)
    return np.clip(np.nan_to_num(db, neginf=-DB_CAP, posinf=DB_CAP), -DB_CAP, DB_CAP)


def _csv(header: list[str], rows: np.ndarray, precision: int) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(float(v), precision) for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, cfg: Config, out: str | None) -> None:
    path = out or cfg.output_path
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _need(cfg: Config, *sections: str) -> None:
    for name in sections:
        if getattr(cfg, name) is None:
            raise ConfigError(f"config needs a {name!r} section for this command")


def _occupation_set(cfg: Config, net: NetworkSpec) -> noisespec.OccupationSet:
    base = noisespec.OccupationSet.from_network(net)
    mech, cav = dict(base.mechanical), dict(base.cavity)
    for label, n in (cfg.occupations or {}).items():
        if label in mech:
            mech[label] = n
        elif label in cav:
            cav[label] = n
        else:
            raise ConfigError(f"occupations: no mode labelled {label!r}")
    return noisespec.OccupationSet(mechanical=mech, cavity=cav)


def cmd_sweep(cfg: Config, out: str | None = None) -> int:
    _need(cfg, "network", "sweep")
    net = cfg.network
    w = cfg.sweep.omegas()
    nc = len(net.cavities)
    s = dynamics.external_block(np.concatenate([m.s[None] for m in dynamics.frequency_sweep(net, w)]), nc)
    labels = [c.label for c in net.cavities]
    header = ["omega_hz"]
    cols = [to_hz(w)]
    for o in range(nc):
        for i in range(nc):
            header += [f"S_{labels[o]}_{labels[i]}_mag2_db", f"S_{labels[o]}_{labels[i]}_phase_rad"]
            cols += [_mag2_db(s[:, o, i]), np.angle(s[:, o, i])]
    _emit(_csv(header, np.column_stack(cols), cfg.precision), cfg, out)
    return EXIT_OK


def cmd_noise(cfg: Config, out: str | None = None) -> int:
    _need(cfg, "network", "sweep", "occupations")
    net = cfg.network
    w = cfg.sweep.omegas()
    n = noisespec.noise_array(net, w, _occupation_set(cfg, net))
    header = ["omega_hz"] + [f"N_{c.label}_quanta" for c in net.cavities]
    _emit(_csv(header, np.column_stack([to_hz(w), n]), cfg.precision), cfg, out)
    return EXIT_OK


def _report(title: str, items: list[tuple[str, str, float | str]], precision: int) -> str:
    """Human-readable lines followed by a flat key=value block."""
    lines = [title]
    for _, text, value in items:
        shown = value if isinstance(value, str) else _fmt(value, precision)
        lines.append(f"  {text}: {shown}")
    lines.append("")
    lines.append("[machine]")
    for key, _, value in items:
        lines.append(f"{key}={value if isinstance(value, str) else _fmt(value, precision)}")
    return "\n".join(lines) + "\n"


def _design_isolator(p: dict, precision: int) -> str:
    gamma = p["gamma_m"]
    if "delta" in p:
        delta = p["delta"]
        c = isolator.optimal_cooperativity(gamma, delta)
    else:
        c = p["cooperativity"]
        delta = isolator.delta_for_cooperativity(c, gamma)
    phi = isolator.isolation_phase(gamma, delta, p["direction"])
    kappas = p.get("kappas")
    kext = p.get("kappa_ext")
    eta = (1.0, 1.0) if kext is None or kappas is None else (kext[0] / kappas[0], kext[1] / kappas[1])
    t = isolator.max_forward_transmission(eta[0], eta[1], c)
    n1, n2 = p["occupations"]
    n_fw, n_bw = noisespec.forward_backward_noise(n1, n2, c)
    items = [
        ("kind", "kind", "isolator"),
        ("direction", "isolating direction", p["direction"]),
        ("phi_rad", "loop phase phi [rad]", phi),
        ("delta_hz", "detuning delta [Hz]", to_hz(delta)),
        ("gamma_m_hz", "mechanical damping [Hz]", to_hz(gamma)),
        ("cooperativity", "cooperativity C", c),
        ("transmission_mag2", "resonant |S|^2, transmitting direction", t),
        ("isolated_mag2", "resonant |S|^2, isolated direction", 0.0),
        ("noise_forward_quanta", "resonant noise, transmitting port [quanta]", n_fw),
        ("noise_backward_quanta", "resonant noise, isolated port [quanta]", n_bw),
    ]
    if kappas is not None:
        params = isolator.IsolatorParams.design_point(
            gamma, delta, kappas[0], kappas[1],
            kext[0] if kext else None, kext[1] if kext else None, p["direction"],
        )
        s = dynamics.scattering(params.to_network(), 0.0).s
        fwd, bwd = (s[1, 0], s[0, 1]) if p["direction"] == "forward" else (s[0, 1], s[1, 0])
        items.append(("numeric_transmission_mag2", "numeric resonant |S|^2, transmitting", float(abs(fwd) ** 2)))
        items.append(("numeric_isolated_abs", "numeric resonant |S|, isolated", float(abs(bwd))))
    return _report("isolator design", items, precision)


def _design_circulator(p: dict, precision: int) -> str:
    beta, gammas, direction = p["beta"], p["gammas"], p["direction"]
    kappas = p.get("kappas")
    n1, n2 = p["occupations"]
    if kappas is not None:
        d, net = circulator.design(beta, gammas, kappas, direction, kappa_ext=p.get("kappa_ext"))
        bound = min(k / g for k in kappas for g in gammas)
        etas = [c.eta for c in net.cavities]
    else:
        d = circulator.CirculatorDesign(
            beta, -beta, circulator.circulator_cooperativity(beta), circulator.direction_phases(direction),
            (-beta * gammas[0], beta * gammas[1]), direction,
        )
        net, bound, etas = None, None, [1.0, 1.0, 1.0]
    c = d.cooperativity
    circ, _ = circulator.hop_pairs(direction)
    items = [
        ("kind", "kind", "circulator"),
        ("direction", "circulation direction", direction),
        ("beta", "beta", beta),
        ("alpha", "alpha", d.alpha),
        ("cooperativity", "matched cooperativity C", c),
        ("phi1_rad", "phase phi1 [rad]", d.phases[0]),
        ("phi2_rad", "phase phi2 [rad]", d.phases[1]),
        ("phi3_rad", "phase phi3 [rad]", d.phases[2]),
        ("delta1_hz", "detuning delta1 [Hz]", to_hz(d.detunings[0])),
        ("delta2_hz", "detuning delta2 [Hz]", to_hz(d.detunings[1])),
    ]
    for o, i in circ:
        items.append(
            (f"transmission_{o + 1}{i + 1}_mag2", f"resonant |S{o + 1}{i + 1}|^2",
             circulator.circulation_transmission(c, etas[o] * etas[i]))
        )
    items.append(("noise_quanta", "resonant noise per port [quanta]", circulator.circulator_noise(c, n1, n2, bound)))
    if net is not None:
        report = circulator.null_certificate(net, direction)
        items.append(("null_certificate", "numeric null certificate", "pass" if report.passed else "fail"))
    return _report("circulator design", items, precision)


def cmd_design(cfg: Config, out: str | None = None) -> int:
    _need(cfg, "design")
    req = cfg.design
    if req.kind == "isolator":
        text = _design_isolator(req.params, cfg.precision)
    else:
        text = _design_circulator(req.params, cfg.precision)
    _emit(text, cfg, out)
    return EXIT_OK


def _check_grid(cfg: Config) -> np.ndarray:
    if cfg.sweep is not None:
        return np.unique(np.append(cfg.sweep.omegas(), 0.0))
    kmax = max(c.kappa for c in cfg.network.cavities) if cfg.network.cavities else 1.0
    scale = max(kmax, max((b.gamma_m for b in cfg.network.mechanicals), default=1.0))
    return np.linspace(-2.0 * scale, 2.0 * scale, 41)


def run_checks(cfg: Config) -> list[tuple[str, bool, str]]:
    """Invariant suite on the configured network: (name, passed, detail)."""
    net = cfg.network
    results = []
    s = dynamics.scattering_array(net, _check_grid(cfg))
    eye = np.eye(s.shape[1])
    dev = float(np.max(np.abs(np.conj(np.swapaxes(s, 1, 2)) @ s - eye)))
    results.append(("unitarity", dev < UNITARITY_TOL, f"max |S^H S - 1| = {dev:.3e}"))

    dyn = dynamics.assemble(net)
    drive = dyn.port_labels[0]
    try:
        col = dynamics.time_domain_response(net, drive, 0.0)
        err = float(np.max(np.abs(col - dynamics.scattering(dyn, 0.0).s[:, 0])))
        results.append(("oracle", err < ORACLE_TOL, f"max |oracle - S| on drive {drive} = {err:.3e}"))
    except OracleFailure as exc:
        results.append(("oracle", False, str(exc)))

    if cfg.preset == "circulator":
        report = circulator.null_certificate(net, cfg.preset_info["direction"])
        detail = "; ".join(f"{c.element} |S|={c.magnitude:.3e}" for c in (report.failures or report.checks))
        results.append(("null_certificate", report.passed, detail))
    elif cfg.preset == "isolator" and cfg.preset_info.get("design_point"):
        s0 = dynamics.scattering(net, 0.0).s
        forward = cfg.preset_info["direction"] == "forward"
        element, value = ("S_a1_a2", s0[0, 1]) if forward else ("S_a2_a1", s0[1, 0])
        mag = float(abs(value))
        results.append(("null_certificate", mag < circulator.SUPPRESS_TOL, f"{element} |S|={mag:.3e}"))
    return results


def cmd_check(cfg: Config, out: str | None = None) -> int:
    _need(cfg, "network")
    results = run_checks(cfg)
    text = "".join(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n" for name, ok, detail in results)
    _emit(text, cfg, out)
    failed = [name for name, ok, _ in results if not ok]
    if failed:
        print(f"modenet: failed invariant(s): {', '.join(failed)}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


COMMANDS = {"sweep": cmd_sweep, "noise": cmd_noise, "design": cmd_design, "check": cmd_check}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modenet", description="Linear optomechanical mode-network tools.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="YAML configuration file")
    parser.add_argument("--out", default=None, help="output path (default: config output.path or stdout)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args.out)
    except DesignInfeasibleError as exc:
        print(f"modenet: infeasible design ({exc.bound}): {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NoFiniteSolutionError as exc:
        print(f"modenet: infeasible design (delta != 0): {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, InvalidParameterError, NotFoundError) as exc:
        print(f"modenet: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModenetError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"modenet: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"modenet: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
