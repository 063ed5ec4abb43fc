"""Domain types and preset networks for linear optomechanical mode networks.

All rates and frequencies are angular (rad/s) inside the library.  Use
:func:`to_angular` / :func:`to_hz` at the boundary when working with
ordinary frequencies.

Sign conventions
----------------
A coupling between cavity ``a`` and mechanical mode ``b`` with magnitude
``g`` and phase ``theta`` puts ``-1j*g*exp(1j*theta)`` into the dynamics
matrix at (row a, column b) and ``-1j*g*exp(-1j*theta)`` at (row b,
column a).  A mechanical mode contributes ``-gamma_m/2 + 1j*d`` on the
diagonal, where ``d`` is its signed ``frame_detuning``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import DesignInfeasibleError, InvalidParameterError, NotFoundError

TWO_PI = 2.0 * math.pi

# beta must exceed this for a positive circulator cooperativity
CIRCULATOR_BETA_BOUND = 1.0 / (2.0 * math.sqrt(3.0))


def to_angular(f_hz):
    """Ordinary frequency (Hz) to angular rate (rad/s)."""
    return TWO_PI * np.asarray(f_hz, dtype=float) if np.ndim(f_hz) else TWO_PI * float(f_hz)


def to_hz(omega):
    """Angular rate (rad/s) to ordinary frequency (Hz)."""
    return np.asarray(omega, dtype=float) / TWO_PI if np.ndim(omega) else float(omega) / TWO_PI


def wrap_phase(theta: float) -> float:
    """Map a phase onto the interval (-pi, pi]."""
    wrapped = math.remainder(float(theta), TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


@dataclass(frozen=True)
class CavityMode:
    """Microwave mode with external (feedline) and internal loss channels."""

    label: str
    kappa_ext: float
    kappa_int: float = 0.0
    bath_occupation: float = 0.0

    def __post_init__(self):
        if self.kappa_ext < 0 or self.kappa_int < 0:
            raise InvalidParameterError(f"cavity {self.label!r}: decay rates must be >= 0")
        if self.kappa_ext + self.kappa_int <= 0:
            raise InvalidParameterError(f"cavity {self.label!r}: total decay rate must be > 0")
        if self.bath_occupation < 0:
            raise InvalidParameterError(f"cavity {self.label!r}: bath occupation must be >= 0")

    @property
    def kappa(self) -> float:
        return self.kappa_ext + self.kappa_int

    @property
    def eta(self) -> float:
        """External coupling fraction kappa_ext / kappa."""
        return self.kappa_ext / self.kappa


@dataclass(frozen=True)
class MechanicalMode:
    label: str
    gamma_m: float
    frame_detuning: float = 0.0
    thermal_occupation: float = 0.0

    def __post_init__(self):
        if not self.gamma_m > 0:
            raise InvalidParameterError(f"mechanical mode {self.label!r}: gamma_m must be > 0")
        if self.thermal_occupation < 0:
            raise InvalidParameterError(
                f"mechanical mode {self.label!r}: thermal occupation must be >= 0"
            )


@dataclass(frozen=True)
class Coupling:
    """Beam-splitter coupling between one cavity and one mechanical mode."""

    cavity: str
    mechanical: str
    magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        if self.magnitude < 0:
            raise InvalidParameterError(
                f"coupling {self.cavity}-{self.mechanical}: magnitude must be >= 0"
            )
        object.__setattr__(self, "phase", wrap_phase(self.phase))

    @property
    def value(self) -> complex:
        """Complex coupling g*exp(i*theta) as it enters the cavity row."""
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class PumpSpec:
    """Pump-enhanced coupling g = g0 * sqrt(n)."""

    vacuum_coupling: float
    photon_number: float

    def __post_init__(self):
        if self.vacuum_coupling < 0 or self.photon_number < 0:
            raise InvalidParameterError("vacuum coupling and photon number must be >= 0")

    @property
    def coupling(self) -> float:
        return self.vacuum_coupling * math.sqrt(self.photon_number)


@dataclass(frozen=True)
class NetworkSpec:
    cavities: tuple[CavityMode, ...]
    mechanicals: tuple[MechanicalMode, ...] = ()
    couplings: tuple[Coupling, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cavities", tuple(self.cavities))
        object.__setattr__(self, "mechanicals", tuple(self.mechanicals))
        object.__setattr__(self, "couplings", tuple(self.couplings))
        if len(self.cavities) + len(self.mechanicals) < 1:
            raise InvalidParameterError("a network needs at least one mode")
        labels = [m.label for m in self.cavities] + [m.label for m in self.mechanicals]
        if len(set(labels)) != len(labels):
            raise InvalidParameterError(f"mode labels must be unique, got {labels}")
        cav = {m.label for m in self.cavities}
        mech = {m.label for m in self.mechanicals}
        seen = set()
        for c in self.couplings:
            if c.cavity not in cav:
                raise NotFoundError(f"coupling references unknown cavity {c.cavity!r}")
            if c.mechanical not in mech:
                raise NotFoundError(f"coupling references unknown mechanical mode {c.mechanical!r}")
            key = (c.cavity, c.mechanical)
            if key in seen:
                raise InvalidParameterError(f"duplicate coupling {key}")
            seen.add(key)

    @property
    def dimension(self) -> int:
        return len(self.cavities) + len(self.mechanicals)

    @property
    def labels(self) -> list[str]:
        return [m.label for m in self.cavities] + [m.label for m in self.mechanicals]

    def cavity(self, label: str) -> CavityMode:
        for m in self.cavities:
            if m.label == label:
                return m
        raise NotFoundError(f"no cavity labelled {label!r}")

    def mechanical(self, label: str) -> MechanicalMode:
        for m in self.mechanicals:
            if m.label == label:
                return m
        raise NotFoundError(f"no mechanical mode labelled {label!r}")

    def cavity_index(self, label: str) -> int:
        return [m.label for m in self.cavities].index(self.cavity(label).label)

    def coupling(self, cavity: str, mechanical: str) -> Coupling | None:
        for c in self.couplings:
            if c.cavity == cavity and c.mechanical == mechanical:
                return c
        return None

    def coupling_matrix(self) -> np.ndarray:
        """Complex couplings g*exp(i*theta), shape (n_cavities, n_mechanicals)."""
        g = np.zeros((len(self.cavities), len(self.mechanicals)), dtype=complex)
        ci = {m.label: i for i, m in enumerate(self.cavities)}
        mi = {m.label: j for j, m in enumerate(self.mechanicals)}
        for c in self.couplings:
            g[ci[c.cavity], mi[c.mechanical]] = c.value
        return g

    def replace_mechanical(self, label: str, **changes) -> NetworkSpec:
        self.mechanical(label)
        mechs = tuple(replace(m, **changes) if m.label == label else m for m in self.mechanicals)
        return replace(self, mechanicals=mechs)


def cooperativity(g: float, kappa: float, gamma_m: float) -> float:
    """Multiphoton cooperativity 4 g^2 / (kappa * gamma_m)."""
    if not kappa > 0 or not gamma_m > 0:
        raise InvalidParameterError("kappa and gamma_m must be > 0")
    if g < 0:
        raise InvalidParameterError("g must be >= 0")
    return 4.0 * g * g / (kappa * gamma_m)


def coupling_for_cooperativity(c: float, kappa: float, gamma_m: float) -> float:
    """Inverse of :func:`cooperativity`: g = sqrt(C kappa gamma_m) / 2."""
    if c < 0:
        raise InvalidParameterError("cooperativity must be >= 0")
    if not kappa > 0 or not gamma_m > 0:
        raise InvalidParameterError("kappa and gamma_m must be > 0")
    return 0.5 * math.sqrt(c * kappa * gamma_m)


def mechanical_susceptibility(mode: MechanicalMode, omega):
    """chi(omega) = 1 / (gamma_m/2 - i (d + omega)), d the frame detuning.

    Accepts scalar or array ``omega``.
    """
    return 1.0 / (0.5 * mode.gamma_m - 1j * (mode.frame_detuning + np.asarray(omega)))


def cavity_susceptibility(mode: CavityMode, omega):
    return 1.0 / (0.5 * mode.kappa - 1j * np.asarray(omega))


def effective_linewidth(gamma_m: float, cooperativities: Iterable[float]) -> float:
    """Optomechanically broadened linewidth gamma_m * (1 + sum C)."""
    if not gamma_m > 0:
        raise InvalidParameterError("gamma_m must be > 0")
    cs = list(cooperativities)
    if any(c < 0 for c in cs):
        raise InvalidParameterError("cooperativities must be >= 0")
    return gamma_m * (1.0 + sum(cs))


def network_cooperativities(net: NetworkSpec) -> dict[tuple[str, str], float]:
    """Cooperativity of every coupling against the current mode linewidths."""
    out = {}
    for c in net.couplings:
        out[(c.cavity, c.mechanical)] = cooperativity(
            c.magnitude, net.cavity(c.cavity).kappa, net.mechanical(c.mechanical).gamma_m
        )
    return out


def network_effective_linewidths(net: NetworkSpec) -> dict[str, float]:
    coop = network_cooperativities(net)
    return {
        m.label: effective_linewidth(m.gamma_m, [v for (_, b), v in coop.items() if b == m.label])
        for m in net.mechanicals
    }


def apply_cross_damping(net: NetworkSpec, mech_label: str, gamma_cross: float) -> NetworkSpec:
    """Add an extra damping channel to one mechanical mode.

    The coupling magnitudes are untouched, so every cooperativity involving
    the mode drops by gamma_m / (gamma_m + gamma_cross).  The extra loss is
    folded into the mode's bath port.
    """
    if gamma_cross < 0:
        raise InvalidParameterError("gamma_cross must be >= 0")
    mode = net.mechanical(mech_label)
    if gamma_cross == 0:
        return net
    return net.replace_mechanical(mech_label, gamma_m=mode.gamma_m + gamma_cross)


def _positive(name: str, values: Sequence[float]):
    for v in values:
        if not v > 0:
            raise InvalidParameterError(f"{name} must be > 0, got {list(values)}")


def isolator_preset(
    kappas: Sequence[float],
    gammas: Sequence[float],
    couplings: Sequence[float],
    delta: float,
    phi: float,
    kappa_ext: Sequence[float] | None = None,
    thermal_occupations: Sequence[float] = (0.0, 0.0),
) -> NetworkSpec:
    """Two cavities (a1, a2) coupled through two mechanical modes (b1, b2).

    Parameters
    ----------
    kappas : (kappa1, kappa2)
        Total cavity decay rates.
    gammas : (gamma_m1, gamma_m2)
        Intrinsic mechanical damping rates.
    couplings : (g11, g21, g12, g22)
        Magnitudes, g_ij coupling cavity i to mechanical mode j.
    delta : float
        Offset of the two conversion windows.  The frame detunings are
        d1 = -delta and d2 = +delta, the sign for which
        :func:`modenet.isolator.isolation_phase` nulls S12.
    phi : float
        Loop phase, carried by the a2-b2 coupling as theta22 = -phi.
    kappa_ext : optional
        External coupling rates; default is overcoupled (kappa_ext = kappa).
    """
    _positive("kappas", kappas)
    _positive("gammas", gammas)
    if len(kappas) != 2 or len(gammas) != 2 or len(couplings) != 4:
        raise InvalidParameterError("isolator needs 2 kappas, 2 gammas and 4 couplings")
    if any(g < 0 for g in couplings):
        raise InvalidParameterError("coupling magnitudes must be >= 0")
    kex = list(kappas) if kappa_ext is None else list(kappa_ext)
    cavities = tuple(
        CavityMode(f"a{i + 1}", kappa_ext=kex[i], kappa_int=kappas[i] - kex[i]) for i in range(2)
    )
    mechanicals = (
        MechanicalMode("b1", gammas[0], frame_detuning=-delta, thermal_occupation=thermal_occupations[0]),
        MechanicalMode("b2", gammas[1], frame_detuning=+delta, thermal_occupation=thermal_occupations[1]),
    )
    g11, g21, g12, g22 = couplings
    links = (
        Coupling("a1", "b1", g11),
        Coupling("a2", "b1", g21),
        Coupling("a1", "b2", g12),
        Coupling("a2", "b2", g22, -phi),
    )
    return NetworkSpec(cavities, mechanicals, links)


def circulator_cooperativity(beta: float) -> float:
    """Matched cooperativity C = 2 beta / sqrt(3) - 1/3 of the circulator."""
    return 2.0 * beta / math.sqrt(3.0) - 1.0 / 3.0


def circulator_beta(c: float) -> float:
    """Inverse of :func:`circulator_cooperativity`."""
    return 0.5 * math.sqrt(3.0) * (c + 1.0 / 3.0)


def circulator_preset(
    kappas: Sequence[float],
    gammas: Sequence[float],
    beta: float,
    phases: Sequence[float] = (2 * math.pi / 3, -2 * math.pi / 3, 0.0),
    kappa_ext: Sequence[float] | None = None,
    thermal_occupations: Sequence[float] = (0.0, 0.0),
) -> NetworkSpec:
    """Three cavities routed through two mechanical modes.

    Frame detunings are d1 = -beta*gamma_m1 and d2 = +beta*gamma_m2.  All six
    cooperativities equal C = 2 beta/sqrt(3) - 1/3; cavity i couples to b1
    with phase phases[i] and to b2 with phase 0.
    """
    _positive("kappas", kappas)
    _positive("gammas", gammas)
    if len(kappas) != 3 or len(gammas) != 2 or len(phases) != 3:
        raise InvalidParameterError("circulator needs 3 kappas, 2 gammas and 3 phases")
    if not beta > CIRCULATOR_BETA_BOUND:
        raise DesignInfeasibleError(
            f"beta = {beta!r} must exceed 1/(2*sqrt(3)) = {CIRCULATOR_BETA_BOUND:.6f}",
            bound="beta > 1/(2*sqrt(3))",
        )
    c = circulator_cooperativity(beta)
    kex = list(kappas) if kappa_ext is None else list(kappa_ext)
    cavities = tuple(
        CavityMode(f"a{i + 1}", kappa_ext=kex[i], kappa_int=kappas[i] - kex[i]) for i in range(3)
    )
    mechanicals = (
        MechanicalMode("b1", gammas[0], frame_detuning=-beta * gammas[0], thermal_occupation=thermal_occupations[0]),
        MechanicalMode("b2", gammas[1], frame_detuning=beta * gammas[1], thermal_occupation=thermal_occupations[1]),
    )
    links = []
    for i in range(3):
        links.append(Coupling(f"a{i + 1}", "b1", coupling_for_cooperativity(c, kappas[i], gammas[0]), phases[i]))
        links.append(Coupling(f"a{i + 1}", "b2", coupling_for_cooperativity(c, kappas[i], gammas[1])))
    return NetworkSpec(cavities, mechanicals, tuple(links))
