"""Langevin matrices, scattering solves and a time-domain oracle.

Equations of motion are ``du/dt = M u + L u_in`` with ``u_out = u_in - L^T u``.
Signals go as ``exp(-1j*omega*t)``, which gives

    S(omega) = 1 + L^T (1j*omega + M)^-1 L

with element ``S[out, in]``.  Ports are ordered external (one per cavity),
then internal loss (one per cavity), then one bath port per mechanical mode.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidParameterError, ModenetError, NotFoundError, OracleFailure
from .model import NetworkSpec, network_effective_linewidths

INTERNAL_SUFFIX = ".int"


@dataclass(frozen=True, eq=False)
class DynamicsMatrices:
    m: np.ndarray
    l: np.ndarray
    port_labels: tuple[str, ...]
    n_cavities: int

    @property
    def n_modes(self) -> int:
        return self.m.shape[0]

    @property
    def n_ports(self) -> int:
        return self.l.shape[1]

    def port_index(self, label: str) -> int:
        try:
            return self.port_labels.index(label)
        except ValueError:
            raise NotFoundError(f"no port labelled {label!r}; ports are {list(self.port_labels)}") from None


@dataclass(frozen=True, eq=False)
class ScatteringMatrix:
    omega: float
    s: np.ndarray
    port_labels: tuple[str, ...]
    n_external: int

    def element(self, out_port: str, in_port: str) -> complex:
        return complex(self.s[self.port_labels.index(out_port), self.port_labels.index(in_port)])


def assemble(net: NetworkSpec) -> DynamicsMatrices:
    """Build (M, L) for a network."""
    nc, nm = len(net.cavities), len(net.mechanicals)
    n = nc + nm
    m = np.zeros((n, n), dtype=complex)
    l = np.zeros((n, 2 * nc + nm))
    for i, cav in enumerate(net.cavities):
        m[i, i] = -cav.kappa / 2
        l[i, i] = math.sqrt(cav.kappa_ext)
        l[i, nc + i] = math.sqrt(cav.kappa_int)
    for j, mech in enumerate(net.mechanicals):
        m[nc + j, nc + j] = complex(-mech.gamma_m / 2, mech.frame_detuning)
        l[nc + j, 2 * nc + j] = math.sqrt(mech.gamma_m)
    g = net.coupling_matrix()
    m[:nc, nc:] = -1j * g
    m[nc:, :nc] = -1j * g.conj().T
    ports = (
        [c.label for c in net.cavities]
        + [c.label + INTERNAL_SUFFIX for c in net.cavities]
        + [b.label for b in net.mechanicals]
    )
    return DynamicsMatrices(m, l, tuple(ports), nc)


def _as_dynamics(obj) -> DynamicsMatrices:
    return obj if isinstance(obj, DynamicsMatrices) else assemble(obj)


def scattering_array(dyn: DynamicsMatrices | NetworkSpec, omegas) -> np.ndarray:
    """Stacked S(omega), shape (len(omegas), p, p); batched LU solves."""
    dyn = _as_dynamics(dyn)
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    if not np.all(np.isfinite(w)):
        raise InvalidParameterError("frequencies must be finite")
    n = dyn.n_modes
    a = dyn.m[None, :, :] + 1j * w[:, None, None] * np.eye(n)[None]
    try:
        x = np.linalg.solve(a, np.broadcast_to(dyn.l.astype(complex), (len(w),) + dyn.l.shape))
    except np.linalg.LinAlgError as exc:
        raise ModenetError("singular dynamics matrix; is every mode damped?") from exc
    return np.eye(dyn.n_ports)[None] + np.einsum("ji,wjk->wik", dyn.l, x)


def scattering(dyn: DynamicsMatrices | NetworkSpec, omega: float) -> ScatteringMatrix:
    dyn = _as_dynamics(dyn)
    s = scattering_array(dyn, [omega])[0]
    return ScatteringMatrix(float(omega), s, dyn.port_labels, dyn.n_cavities)


def external_block(s: ScatteringMatrix | np.ndarray, n_external: int | None = None) -> np.ndarray:
    """Sub-matrix of S over the external cavity ports."""
    if isinstance(s, ScatteringMatrix):
        return s.s[: s.n_external, : s.n_external]
    return s[..., :n_external, :n_external]


def default_workers() -> int:
    """Thread count from ``MODENET_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("MODENET_THREADS", "1")))
    except ValueError:
        return 1


def frequency_sweep(
    net: NetworkSpec | DynamicsMatrices, omegas: Sequence[float], workers: int | None = None
) -> list[ScatteringMatrix]:
    """One ScatteringMatrix per frequency, in input order.

    Frequencies are split into contiguous chunks solved on ``workers``
    threads; the result does not depend on the worker count.
    """
    dyn = _as_dynamics(net)
    w = np.asarray(list(omegas), dtype=float)
    if w.size == 0:
        return []
    workers = default_workers() if workers is None else max(1, workers)
    chunks = np.array_split(w, min(workers, w.size))
    if len(chunks) == 1:
        blocks = [scattering_array(dyn, w)]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            blocks = list(pool.map(lambda c: scattering_array(dyn, c), chunks))
    s = np.concatenate(blocks)
    return [ScatteringMatrix(float(wi), si, dyn.port_labels, dyn.n_cavities) for wi, si in zip(w, s)]


@dataclass(frozen=True)
class Band:
    """Contiguous frequency interval around omega = 0 where a metric passes.

    ``met`` is False when the threshold fails already at omega = 0 (then the
    width is zero).  ``clipped`` marks an edge that hit the search window.
    """

    lower: float
    upper: float
    met: bool
    clipped: bool = False

    @property
    def width(self) -> float:
        return self.upper - self.lower


def threshold_band(
    metric: Callable[[np.ndarray], np.ndarray],
    threshold: float,
    window: float,
    points: int = 2001,
    center: float = 0.0,
) -> Band:
    """Find the interval around ``center`` on which ``metric >= threshold``.

    ``metric`` maps an array of angular frequencies to values.  Edges are
    bracketed on a uniform grid over ``center +/- window`` and refined with
    Brent's method.
    """
    if metric(np.array([center]))[0] < threshold:
        return Band(center, center, met=False)
    scalar = lambda x: float(metric(np.array([x]))[0]) - threshold
    edges = []
    clipped = False
    for sign in (+1.0, -1.0):
        grid = center + sign * np.linspace(0.0, window, points)
        vals = metric(grid) - threshold
        bad = np.nonzero(vals < 0)[0]
        if bad.size == 0:
            edges.append(grid[-1])
            clipped = True
            continue
        k = bad[0]
        edges.append(brentq(scalar, grid[k - 1], grid[k], xtol=1e-12 * max(window, 1.0), rtol=1e-13))
    upper, lower = edges
    return Band(float(lower), float(upper), met=True, clipped=clipped)


# -- time-domain oracle -------------------------------------------------------


def _rk4_step(a: np.ndarray, b: np.ndarray, v: np.ndarray, z: complex, h: float, rot: complex) -> np.ndarray:
    """One classical RK4 step of dv/dt = a v + b z(t), z(t) = z*exp(-i w t).

    ``rot`` is exp(-1j*w*h/2), the forcing phase advance over half a step.
    """
    k1 = a @ v + b * z
    k2 = a @ (v + 0.5 * h * k1) + b * (z * rot)
    k3 = a @ (v + 0.5 * h * k2) + b * (z * rot)
    k4 = a @ (v + h * k3) + b * (z * rot * rot)
    return v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass(frozen=True)
class OraclePlan:
    step: float
    horizon: float
    n_steps: int
    settle_time: float


def plan_oracle(net: NetworkSpec, omega: float, horizon: float | None = None) -> OraclePlan:
    """Step size and horizon for :func:`time_domain_response`.

    The step is at most 1/(50 * rate), rate covering |omega|, every kappa,
    every effective mechanical linewidth, frame detunings and couplings.
    ``settle_time`` is the inverse of the slowest decay rate of M; the
    default horizon is 40 settle times.
    """
    dyn = assemble(net)
    rates = [abs(omega)]
    rates += [c.kappa for c in net.cavities]
    rates += list(network_effective_linewidths(net).values())
    rates += [abs(b.frame_detuning) for b in net.mechanicals]
    rates += [2 * c.magnitude for c in net.couplings]
    step = 1.0 / (50.0 * max(rates))
    settle = 1.0 / float(np.min(np.abs(np.linalg.eigvals(dyn.m).real)))
    if horizon is None:
        horizon = 40.0 * settle
    return OraclePlan(step, float(horizon), int(math.ceil(horizon / step)), settle)


def _oracle_columns(net: NetworkSpec, cols: Sequence[int], omega: float, horizon, tol: float):
    dyn = assemble(net)
    plan = plan_oracle(net, omega, horizon)
    h = plan.step
    a = dyn.m
    b = dyn.l[:, cols].astype(complex)
    n = dyn.n_modes
    rot = complex(math.cos(omega * h / 2), -math.sin(omega * h / 2))
    # RK4 is affine in (v, z): one step is v <- P v + Q z, z advancing by rot**2
    pk = _rk4_step(a, np.zeros((n, n)), np.eye(n, dtype=complex), 0.0, h, rot)
    qk = _rk4_step(a, b, np.zeros((n, len(cols)), dtype=complex), 1.0, h, rot)
    ck = rot * rot
    # compose into blocks of k = 2**j steps so stiff networks stay cheap
    k = 1
    while 2 * k * 4000 <= plan.n_steps:
        pk, qk, ck = pk @ pk, pk @ qk + ck * qk, ck * ck
        ck /= abs(ck)
        k *= 2
    block_time = k * h
    # compare envelopes one settle time apart so slow tails are not mistaken
    # for convergence
    lag = max(1, int(math.ceil(plan.settle_time / block_time)))
    history = []
    v = np.zeros_like(b)
    z = 1.0 + 0j
    for _ in range(int(math.ceil(plan.n_steps / k))):
        v = pk @ v + qk * z
        z *= ck
        z /= abs(z)
        envelope = v / z
        history.append(envelope)
        if len(history) > lag:
            past = history.pop(0)
            scale = max(np.max(np.abs(envelope)), 1e-300)
            if np.max(np.abs(envelope - past)) / scale < tol:
                return dyn, envelope
    raise OracleFailure(
        f"no steady state within horizon {plan.horizon:.3e} s ({plan.n_steps} steps) at omega={omega!r}"
    )


def time_domain_response(
    net: NetworkSpec,
    drive_port: str,
    omega: float,
    horizon: float | None = None,
    tol: float = 1e-6,
) -> np.ndarray:
    """Steady-state output amplitudes for a unit coherent drive on one port.

    Integrates the equations of motion with fixed-step RK4 from rest under an
    input ``exp(-1j*omega*t)`` on ``drive_port`` until the demodulated mode
    amplitudes stop changing (relative change below ``tol`` across one
    settle time of the slowest mode).  Returns the output amplitude on every port, in
    ``assemble(net).port_labels`` order; this is the ``drive_port`` column
    of S(omega) computed without any linear solve.
    """
    col = assemble(net).port_index(drive_port)
    dyn, env = _oracle_columns(net, [col], omega, horizon, tol)
    out = -dyn.l.T @ env[:, 0]
    out[col] += 1.0
    return out


def time_domain_scattering(net: NetworkSpec, omega: float, horizon: float | None = None, tol: float = 1e-6) -> np.ndarray:
    """Full S(omega) from the time-domain oracle, all ports driven in parallel."""
    dyn = assemble(net)
    cols = list(range(dyn.n_ports))
    dyn, env = _oracle_columns(net, cols, omega, horizon, tol)
    return np.eye(dyn.n_ports) - dyn.l.T @ env
