"""Symmetrized output noise spectra and noise-interference couplings.

Noise is expressed in quanta with vacuum contributing 1/2.  For an output
port p the spectrum is

    N_p(omega) = sum_q |S_pq(-omega)|^2 (n_q + 1/2)

summed over every input channel q (external, internal loss, mechanical).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import dynamics
from .errors import DesignInfeasibleError, InvalidParameterError, NotFoundError
from .isolator import IsolatorParams
from .model import NetworkSpec

VACUUM_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class NoiseSpectrum:
    port: str
    omegas: np.ndarray
    quanta: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.quanta, dtype=float)
        object.__setattr__(self, "omegas", np.asarray(self.omegas, dtype=float))
        object.__setattr__(self, "quanta", q)
        if q.shape != self.omegas.shape:
            raise InvalidParameterError("omegas and quanta must have the same shape")
        if q.size and q.min() < 0.5 - VACUUM_TOLERANCE:
            raise InvalidParameterError(f"noise below vacuum on port {self.port!r}: {q.min()!r}")


@dataclass(frozen=True)
class OccupationSet:
    """Bath occupations by label.

    ``cavity`` sets the internal-loss bath of each cavity and ``external``
    the occupation of the line feeding each external port.  Missing labels
    are vacuum.
    """

    mechanical: Mapping[str, float] = field(default_factory=dict)
    cavity: Mapping[str, float] = field(default_factory=dict)
    external: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for group in (self.mechanical, self.cavity, self.external):
            for label, n in group.items():
                if not n >= 0:
                    raise InvalidParameterError(f"occupation of {label!r} must be >= 0, got {n!r}")

    @classmethod
    def from_network(cls, net: NetworkSpec) -> OccupationSet:
        return cls(
            mechanical={b.label: b.thermal_occupation for b in net.mechanicals},
            cavity={c.label: c.bath_occupation for c in net.cavities},
        )

    def port_vector(self, net: NetworkSpec) -> np.ndarray:
        """Occupation of every input channel, in port order."""
        known = {c.label for c in net.cavities} | {b.label for b in net.mechanicals}
        for group in (self.mechanical, self.cavity, self.external):
            for label in group:
                if label not in known:
                    raise NotFoundError(f"no mode labelled {label!r}")
        n = [self.external.get(c.label, 0.0) for c in net.cavities]
        n += [self.cavity.get(c.label, 0.0) for c in net.cavities]
        n += [self.mechanical.get(b.label, 0.0) for b in net.mechanicals]
        return np.asarray(n, dtype=float)


def _external_port(net: NetworkSpec, port: str) -> int:
    labels = [c.label for c in net.cavities]
    if port not in labels:
        raise NotFoundError(f"{port!r} is not an external cavity port; choose from {labels}")
    return labels.index(port)


def noise_array(net: NetworkSpec, omegas, occ: OccupationSet | None = None) -> np.ndarray:
    """Noise on every external port, shape (len(omegas), n_cavities)."""
    occ = OccupationSet.from_network(net) if occ is None else occ
    n = occ.port_vector(net)
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    s = dynamics.scattering_array(net, -w)
    nc = len(net.cavities)
    return np.abs(s[:, :nc, :]) ** 2 @ (n + 0.5)


def output_noise(net: NetworkSpec, occ: OccupationSet | None, omega: float, port: str) -> float:
    """Symmetrized noise in quanta leaving external ``port`` at ``omega``.

    ``occ=None`` takes the occupations stored on the network's modes.
    """
    k = _external_port(net, port)
    return float(noise_array(net, [omega], occ)[0, k])


def noise_spectrum(net: NetworkSpec, omegas, port: str, occ: OccupationSet | None = None) -> NoiseSpectrum:
    k = _external_port(net, port)
    w = np.asarray(omegas, dtype=float)
    return NoiseSpectrum(port, w, noise_array(net, w, occ)[:, k])


def forward_backward_noise(n1: float, n2: float, c: float) -> tuple[float, float]:
    """Resonant (forward, backward) noise of the symmetric overcoupled isolator.

    Forward is the transmitting output port, backward the isolated one.
    """
    if c < 0.5:
        raise DesignInfeasibleError(f"C = {c!r} must be >= 1/2", bound="C >= 1/2")
    if n1 < 0 or n2 < 0:
        raise InvalidParameterError("occupations must be >= 0")
    return 0.5 + (n1 + n2) / (4.0 * c), 0.5 + (n1 + n2) / 2.0


def _inv_cavity_susceptibility(kappa: float, omega):
    return kappa / 2 - 1j * np.asarray(omega)


def _inv_mech_susceptibility(gamma: float, detuning: float, omega):
    return gamma / 2 - 1j * (detuning + np.asarray(omega))


def effective_coupling_t22(p: IsolatorParams, omega):
    """Coupling between a2 and b2 once the pair (a1, b1) is eliminated.

    Returns -i g22 [1 - r / (1 + (chi_c1 chi_1 |g11|^2)^-1)] with the complex
    coupling ratio r = g12 g21 / (g22 g11), so the loop phase enters as
    exp(+i phi).  Equals the (a2, b2) entry of the Schur complement of
    (i omega + M).
    """
    g = p.complex_couplings()
    g11, g12, g21, g22 = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    if g11 == 0:
        return -1j * g22 * np.ones_like(np.asarray(omega, dtype=complex))
    inv = _inv_cavity_susceptibility(p.kappa1, omega) * _inv_mech_susceptibility(p.gamma1, -p.delta, omega)
    return -1j * g22 * (1.0 - (g12 * g21 / (g22 * g11)) / (1.0 + inv / abs(g11) ** 2))


def effective_coupling_t12(p: IsolatorParams, omega):
    """Coupling between a1 and b2 once the pair (a2, b1) is eliminated.

    Index-swapped companion of :func:`effective_coupling_t22`, with ratio
    g11 g22 / (g12 g21) carrying exp(-i phi).
    """
    g = p.complex_couplings()
    g11, g12, g21, g22 = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    if g21 == 0:
        return -1j * g12 * np.ones_like(np.asarray(omega, dtype=complex))
    inv = _inv_cavity_susceptibility(p.kappa2, omega) * _inv_mech_susceptibility(p.gamma1, -p.delta, omega)
    return -1j * g12 * (1.0 - (g11 * g22 / (g12 * g21)) / (1.0 + inv / abs(g21) ** 2))


def eliminated_cavity_coupling(net: NetworkSpec, i: str, j: str, omega: float) -> complex:
    """Mechanically mediated cavity coupling -i sum_k chi_k g_ik conj(g_jk).

    Couplings enter as complex values g exp(i theta).  After the mechanical
    modes are eliminated the cavity block of -(i omega + M) reads
    diag(kappa/2 - i omega) + 1j * T with T the returned matrix.
    """
    gm = net.coupling_matrix()
    a, b = net.cavity_index(i), net.cavity_index(j)
    chi = np.array(
        [1.0 / _inv_mech_susceptibility(m.gamma_m, m.frame_detuning, omega) for m in net.mechanicals],
        dtype=complex,
    )
    return complex(-1j * np.sum(chi * gm[a] * gm[b].conj()))


def ideal_isolator_scattering(c: float) -> np.ndarray:
    """Resonant optical S of the impedance-matched ideal isolator."""
    if c < 0.5:
        raise DesignInfeasibleError(f"C = {c!r} must be >= 1/2", bound="C >= 1/2")
    t = np.sqrt(1.0 - 1.0 / (2.0 * c))
    return np.array([[0.0, 0.0], [t, 0.0]], dtype=complex)


def ideal_backward_noise(n1: float, n2: float) -> float:
    """Quanta leaving the isolated port of the ideal isolator."""
    if n1 < 0 or n2 < 0:
        raise InvalidParameterError("occupations must be >= 0")
    return (n1 + n2 + 1.0) / 2.0
