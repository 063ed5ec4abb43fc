"""Closed-form analysis of the two-cavity, two-mechanical-mode isolator.

The analytic expressions here use the frame detunings of
:func:`modenet.model.isolator_preset` (b1 at -delta, b2 at +delta), so every
closed form can be checked against the numeric scattering matrix of the
matching network.  With that convention, ``phi = 2*atan(gamma_m/(2*delta))``
suppresses S12 (transmission a2 -> a1) on resonance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from . import dynamics
from .dynamics import Band, threshold_band
from .errors import (
    DegenerateDenominatorError,
    DesignInfeasibleError,
    InvalidParameterError,
    NoFiniteSolutionError,
)
from .model import (
    MechanicalMode,
    NetworkSpec,
    coupling_for_cooperativity,
    cooperativity,
    isolator_preset,
    mechanical_susceptibility,
)

Direction = Literal["forward", "backward"]

DEFAULT_DB_CEILING = 200.0


@dataclass(frozen=True)
class IsolatorParams:
    """Analytic parameter set of the isolator (angular units).

    ``kappa_ext1``/``kappa_ext2`` default to the total rates (overcoupled).
    """

    g11: float
    g21: float
    g12: float
    g22: float
    phi: float
    delta: float
    gamma1: float
    gamma2: float
    kappa1: float
    kappa2: float
    kappa_ext1: float | None = None
    kappa_ext2: float | None = None

    def __post_init__(self):
        if min(self.g11, self.g21, self.g12, self.g22) < 0:
            raise InvalidParameterError("coupling magnitudes must be >= 0")
        if min(self.gamma1, self.gamma2, self.kappa1, self.kappa2) <= 0:
            raise InvalidParameterError("decay rates must be > 0")
        if self.kappa_ext1 is None:
            object.__setattr__(self, "kappa_ext1", self.kappa1)
        if self.kappa_ext2 is None:
            object.__setattr__(self, "kappa_ext2", self.kappa2)

    @classmethod
    def from_cooperativities(
        cls,
        c11: float,
        c21: float,
        c12: float,
        c22: float,
        *,
        phi: float,
        delta: float,
        gamma1: float,
        gamma2: float,
        kappa1: float,
        kappa2: float,
        kappa_ext1: float | None = None,
        kappa_ext2: float | None = None,
    ) -> IsolatorParams:
        return cls(
            g11=coupling_for_cooperativity(c11, kappa1, gamma1),
            g21=coupling_for_cooperativity(c21, kappa2, gamma1),
            g12=coupling_for_cooperativity(c12, kappa1, gamma2),
            g22=coupling_for_cooperativity(c22, kappa2, gamma2),
            phi=phi,
            delta=delta,
            gamma1=gamma1,
            gamma2=gamma2,
            kappa1=kappa1,
            kappa2=kappa2,
            kappa_ext1=kappa_ext1,
            kappa_ext2=kappa_ext2,
        )

    @classmethod
    def design_point(
        cls,
        gamma_m: float,
        delta: float,
        kappa1: float,
        kappa2: float,
        kappa_ext1: float | None = None,
        kappa_ext2: float | None = None,
        direction: Direction = "forward",
    ) -> IsolatorParams:
        """Symmetric isolator at the optimal cooperativity and isolating phase."""
        c = optimal_cooperativity(gamma_m, delta)
        return cls.from_cooperativities(
            c, c, c, c,
            phi=isolation_phase(gamma_m, delta, direction),
            delta=delta,
            gamma1=gamma_m,
            gamma2=gamma_m,
            kappa1=kappa1,
            kappa2=kappa2,
            kappa_ext1=kappa_ext1,
            kappa_ext2=kappa_ext2,
        )

    @property
    def cooperativities(self) -> tuple[float, float, float, float]:
        """(C11, C21, C12, C22)."""
        return (
            cooperativity(self.g11, self.kappa1, self.gamma1),
            cooperativity(self.g21, self.kappa2, self.gamma1),
            cooperativity(self.g12, self.kappa1, self.gamma2),
            cooperativity(self.g22, self.kappa2, self.gamma2),
        )

    @property
    def mechanical_modes(self) -> tuple[MechanicalMode, MechanicalMode]:
        return (
            MechanicalMode("b1", self.gamma1, frame_detuning=-self.delta),
            MechanicalMode("b2", self.gamma2, frame_detuning=+self.delta),
        )

    def complex_couplings(self) -> np.ndarray:
        """g_ij * exp(i theta_ij) indexed [cavity, mechanical]."""
        return np.array(
            [[self.g11, self.g12], [self.g21, self.g22 * np.exp(-1j * self.phi)]], dtype=complex
        )

    def to_network(self, thermal_occupations=(0.0, 0.0)) -> NetworkSpec:
        return isolator_preset(
            (self.kappa1, self.kappa2),
            (self.gamma1, self.gamma2),
            (self.g11, self.g21, self.g12, self.g22),
            self.delta,
            self.phi,
            kappa_ext=(self.kappa_ext1, self.kappa_ext2),
            thermal_occupations=thermal_occupations,
        )


@dataclass(frozen=True)
class IsolationPoint:
    """A (phase, frequency) pair at which one transmission direction vanishes.

    ``direction`` is ``"forward"`` when a1 -> a2 passes and S12 is nulled
    (port a1 isolated), ``"backward"`` for the mirror case.
    """

    phi: float
    omega: float
    direction: Direction = "forward"


def single_path_s21(c11: float, c21: float, gamma_m: float, kappa_fracs=(1.0, 1.0), omega=0.0):
    """Conversion a1 -> a2 through a single mechanical mode.

    ``kappa_fracs`` are the external fractions kappa_ext,i / kappa_i.
    """
    if not gamma_m > 0:
        raise InvalidParameterError("gamma_m must be > 0")
    if c11 < 0 or c21 < 0:
        raise InvalidParameterError("cooperativities must be >= 0")
    eta1, eta2 = kappa_fracs
    gamma_eff = gamma_m * (1.0 + c11 + c21)
    return math.sqrt(eta1 * eta2) * math.sqrt(c11 * c21) * gamma_m / (gamma_eff / 2 - 1j * np.asarray(omega))


def _path_amplitudes(p: IsolatorParams, omega):
    b1, b2 = p.mechanical_modes
    direct = p.g11 * mechanical_susceptibility(b1, omega) * p.g21
    looped = p.g12 * mechanical_susceptibility(b2, omega) * p.g22
    return direct, looped


def transmission_ratio(p: IsolatorParams, omega):
    """S12/S21 from the interference of the two mechanical pathways.

    Raises :class:`DegenerateDenominatorError` where S21 itself vanishes.
    """
    direct, looped = _path_amplitudes(p, omega)
    num = direct + looped * np.exp(1j * p.phi)
    den = direct + looped * np.exp(-1j * p.phi)
    scale = np.maximum(np.abs(direct) + np.abs(looped), 1e-300)
    if np.any(np.abs(den) < 1e-14 * scale):
        raise DegenerateDenominatorError("forward transmission S21 vanishes; ratio undefined")
    return num / den


def isolation_phase(gamma_m: float, delta: float, direction: Direction = "forward") -> float:
    """Loop phase nulling resonant transmission in one direction.

    Solves gamma_m/(2 delta) = tan(phi/2) on the principal branch.  The
    ``"backward"`` direction (S21 nulled) is the mirror phase -phi.
    """
    if not gamma_m > 0:
        raise InvalidParameterError("gamma_m must be > 0")
    if delta == 0:
        raise NoFiniteSolutionError("delta = 0: the isolating phase would be pi (reciprocal on resonance)")
    phi = 2.0 * math.atan(gamma_m / (2.0 * delta))
    return phi if direction == "forward" else -phi


def optimal_cooperativity(gamma_m: float, delta: float) -> float:
    """Cooperativity 1/2 + 2 delta^2/gamma_m^2 maximising forward transmission."""
    if not gamma_m > 0:
        raise InvalidParameterError("gamma_m must be > 0")
    return 0.5 + 2.0 * delta**2 / gamma_m**2


def delta_for_cooperativity(c: float, gamma_m: float) -> float:
    """Positive detuning at which ``c`` is the optimal cooperativity."""
    if c < 0.5:
        raise DesignInfeasibleError(f"C = {c!r} below 1/2 has no matching detuning", bound="C >= 1/2")
    return gamma_m * math.sqrt((c - 0.5) / 2.0)


def max_forward_transmission(eta1: float, eta2: float, c: float) -> float:
    """|S21|^2 at the optimum: eta1 * eta2 * (1 - 1/(2C))."""
    if c < 0.5:
        raise DesignInfeasibleError(f"C = {c!r} must be >= 1/2", bound="C >= 1/2")
    if not (0 <= eta1 <= 1 and 0 <= eta2 <= 1):
        raise InvalidParameterError("external fractions must lie in [0, 1]")
    return eta1 * eta2 * (1.0 - 1.0 / (2.0 * c))


def asymmetric_isolation_point(
    gamma1: float,
    gamma2: float,
    delta: float,
    matching: Literal["equal_effective_rates", "matched_cooperativities"] = "matched_cooperativities",
) -> IsolationPoint:
    """Isolating phase and frequency for unequal mechanical damping rates.

    With gamma_pm = (gamma1 +/- gamma2)/2 the phase obeys
    tan(phi/2) = gamma_plus/(2 delta).  Matched cooperativities null S12 at
    omega = -gamma_minus*delta/gamma_plus.  Equal effective linewidths put the
    null at omega = gamma_plus*gamma_minus/(4 delta); that one is exact when
    the coupling products |g11 g21| and |g12 g22| are equal, which equal
    effective linewidths imply only at large cooperativity.
    """
    if delta == 0:
        raise NoFiniteSolutionError("delta = 0 has no finite isolation point")
    if not (gamma1 > 0 and gamma2 > 0):
        raise InvalidParameterError("damping rates must be > 0")
    gp = 0.5 * (gamma1 + gamma2)
    gm = 0.5 * (gamma1 - gamma2)
    phi = 2.0 * math.atan(gp / (2.0 * delta))
    if matching == "equal_effective_rates":
        omega = gp * gm / (4.0 * delta)
    elif matching == "matched_cooperativities":
        omega = -gm * delta / gp
    else:
        raise InvalidParameterError(f"unknown matching {matching!r}")
    return IsolationPoint(phi, omega)


def _isolation_from_s(s21, s12, ceiling):
    a = np.abs(s21) ** 2
    b = np.abs(s12) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        db = 10.0 * np.log10(a / b)
    db = np.where((a == 0) & (b == 0), 0.0, db)
    return np.clip(np.nan_to_num(db, posinf=ceiling, neginf=-ceiling), -ceiling, ceiling)


def isolation_db(
    net: NetworkSpec, omega, ports=("a1", "a2"), ceiling: float = DEFAULT_DB_CEILING
):
    """10 log10(|S21|^2/|S12|^2) from the numeric solve, clipped to +/- ceiling.

    ``ports`` names (port 1, port 2); scalar or array ``omega``.
    """
    dyn = dynamics.assemble(net)
    i, j = dyn.port_index(ports[0]), dyn.port_index(ports[1])
    s = dynamics.scattering_array(dyn, omega)
    out = _isolation_from_s(s[:, j, i], s[:, i, j], ceiling)
    return float(out[0]) if np.ndim(omega) == 0 else out


def nonreciprocal_bandwidth(
    net: NetworkSpec, threshold_db: float = 20.0, window: float | None = None, center: float = 0.0
) -> Band:
    """Interval around ``center`` where |isolation_db| stays above threshold.

    The default search window is 50 intrinsic mechanical linewidths.
    """
    if window is None:
        window = 50.0 * max(b.gamma_m for b in net.mechanicals)
    metric = lambda w: np.abs(isolation_db(net, w))
    return threshold_band(metric, threshold_db, window, center=center)


def conversion_bandwidth(net: NetworkSpec, ports=("a1", "a2"), window: float | None = None) -> Band:
    """Full width at half maximum of |S21(omega)|^2 around omega = 0."""
    dyn = dynamics.assemble(net)
    i, j = dyn.port_index(ports[0]), dyn.port_index(ports[1])
    if window is None:
        window = 2.0 * max(c.kappa for c in net.cavities)
    power = lambda w: np.abs(dynamics.scattering_array(dyn, w)[:, j, i]) ** 2
    peak = float(power(np.array([0.0]))[0])
    return threshold_band(power, 0.5 * peak, window, points=20001)


def reverse_direction(p: IsolatorParams) -> IsolatorParams:
    """Same device with the loop phase negated (isolation direction swapped)."""
    return replace(p, phi=-p.phi)
