"""Design and certification of the three-cavity, two-mechanical circulator.

Counter-clockwise circulation routes a1 -> a2 -> a3 -> a1, so S21, S32 and
S13 transmit while S12, S23 and S31 vanish on resonance.  Clockwise designs
negate the coupling phases, which transposes the pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from . import dynamics
from .dynamics import Band, threshold_band
from .errors import CertificationFailure, DesignInfeasibleError, InvalidParameterError
from .model import (
    CIRCULATOR_BETA_BOUND,
    NetworkSpec,
    circulator_cooperativity,
    circulator_preset,
)

Direction = Literal["counter_clockwise", "clockwise"]

BASE_PHASES = (2.0 * math.pi / 3.0, -2.0 * math.pi / 3.0, 0.0)
SUPPRESS_TOL = 1e-10
MATCH_RTOL = 1e-9


@dataclass(frozen=True)
class CirculatorDesign:
    beta: float
    alpha: float
    cooperativity: float
    phases: tuple[float, float, float]
    detunings: tuple[float, float]
    direction: Direction = "counter_clockwise"

    def __post_init__(self):
        if not self.beta > CIRCULATOR_BETA_BOUND:
            raise DesignInfeasibleError(
                f"beta = {self.beta!r} must exceed 1/(2*sqrt(3))", bound="beta > 1/(2*sqrt(3))"
            )
        if self.direction not in ("counter_clockwise", "clockwise"):
            raise InvalidParameterError(f"unknown direction {self.direction!r}")


def direction_phases(direction: Direction) -> tuple[float, float, float]:
    if direction == "counter_clockwise":
        return BASE_PHASES
    if direction == "clockwise":
        return tuple(-p for p in BASE_PHASES)
    raise InvalidParameterError(f"unknown direction {direction!r}")


def hop_pairs(direction: Direction) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """(circulating, suppressed) index pairs (out, in) of the external block."""
    ccw = [(1, 0), (2, 1), (0, 2)]
    cw = [(j, i) for i, j in ccw]
    if direction == "counter_clockwise":
        return ccw, cw
    if direction == "clockwise":
        return cw, ccw
    raise InvalidParameterError(f"unknown direction {direction!r}")


def _noise_validity_bound(kappas: Sequence[float], gammas: Sequence[float]) -> float:
    return min(k / g for k in kappas for g in gammas)


def design(
    beta: float,
    gammas: Sequence[float],
    kappas: Sequence[float],
    direction: Direction = "counter_clockwise",
    kappa_ext: Sequence[float] | None = None,
    thermal_occupations: Sequence[float] = (0.0, 0.0),
) -> tuple[CirculatorDesign, NetworkSpec]:
    """Solve the circulator for ``beta`` and build its network.

    Raises :class:`DesignInfeasibleError` when beta is at or below
    1/(2 sqrt 3) or when C reaches min(kappa_i / gamma_j).
    """
    if not beta > CIRCULATOR_BETA_BOUND:
        raise DesignInfeasibleError(
            f"beta = {beta!r} must exceed 1/(2*sqrt(3)) = {CIRCULATOR_BETA_BOUND:.6f}",
            bound="beta > 1/(2*sqrt(3))",
        )
    c = circulator_cooperativity(beta)
    bound = _noise_validity_bound(kappas, gammas)
    if not c < bound:
        raise DesignInfeasibleError(
            f"C = {c!r} must stay below min(kappa_i/gamma_j) = {bound!r}", bound="C < min(kappa_i/gamma_j)"
        )
    phases = direction_phases(direction)
    net = circulator_preset(
        kappas, gammas, beta, phases=phases, kappa_ext=kappa_ext, thermal_occupations=thermal_occupations
    )
    d = CirculatorDesign(
        beta=beta,
        alpha=-beta,
        cooperativity=c,
        phases=phases,
        detunings=(-beta * gammas[0], beta * gammas[1]),
        direction=direction,
    )
    return d, net


def circulation_transmission(c: float, eta: float = 1.0) -> float:
    """Resonant power transmission per circulating hop, eta/(1 + 1/(3C))^2."""
    if not c > 0:
        raise InvalidParameterError(f"cooperativity must be > 0, got {c!r}")
    return eta / (1.0 + 1.0 / (3.0 * c)) ** 2


def circulator_noise(c: float, n1: float, n2: float, validity_bound: float | None = None) -> float:
    """Resonant noise in quanta at each port: 1/2 + 3C/(3C+1)^2 (n1 + n2).

    ``validity_bound`` is min(kappa_i/gamma_j) of the device, if known.
    """
    if not c > 0:
        raise DesignInfeasibleError(f"cooperativity must be > 0, got {c!r}", bound="C > 0")
    if validity_bound is not None and not c < validity_bound:
        raise DesignInfeasibleError(
            f"C = {c!r} outside the validity range C < {validity_bound!r}", bound="C < min(kappa_i/gamma_j)"
        )
    if n1 < 0 or n2 < 0:
        raise InvalidParameterError("occupations must be >= 0")
    return 0.5 + 3.0 * c / (3.0 * c + 1.0) ** 2 * (n1 + n2)


@dataclass(frozen=True)
class ElementCheck:
    element: str
    magnitude: float
    expected: float | None
    passed: bool


@dataclass(frozen=True)
class NullReport:
    direction: Direction
    cooperativity: float
    checks: tuple[ElementCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[ElementCheck]:
        return [c for c in self.checks if not c.passed]

    def raise_if_failed(self) -> None:
        if self.failures:
            bad = self.failures[0]
            raise CertificationFailure(
                bad.element,
                bad.magnitude,
                f"{bad.element}: |S| = {bad.magnitude:.3e}"
                + ("" if bad.expected is None else f", expected |S|^2 = {bad.expected:.12g}"),
            )


def _matched_cooperativity(net: NetworkSpec) -> float:
    from .model import network_cooperativities

    cs = list(network_cooperativities(net).values())
    return float(np.mean(cs))


def null_certificate(net: NetworkSpec, direction: Direction = "counter_clockwise") -> NullReport:
    """Check the resonant circulation pattern of a three-cavity network.

    Suppressed elements must have |S| < 1e-10; circulating |S|^2 must equal
    :func:`circulation_transmission` with the hop's external fractions to
    1e-9 relative.  The cooperativity is the mean over the couplings.
    """
    if len(net.cavities) != 3:
        raise InvalidParameterError("null_certificate needs a three-cavity network")
    s = dynamics.external_block(dynamics.scattering(net, 0.0))
    c = _matched_cooperativity(net)
    eta = [cav.eta for cav in net.cavities]
    labels = [cav.label for cav in net.cavities]
    circ, supp = hop_pairs(direction)
    checks = []
    for o, i in supp:
        mag = float(abs(s[o, i]))
        checks.append(ElementCheck(f"S_{labels[o]}_{labels[i]}", mag, 0.0, mag < SUPPRESS_TOL))
    for o, i in circ:
        mag = float(abs(s[o, i]))
        expected = circulation_transmission(c, eta[o] * eta[i]) if c > 0 else 0.0
        ok = abs(mag**2 - expected) <= MATCH_RTOL * max(expected, 1e-300)
        checks.append(ElementCheck(f"S_{labels[o]}_{labels[i]}", mag, expected, ok))
    return NullReport(direction, c, tuple(checks))


def isolation_margin_db(net: NetworkSpec, omegas, direction: Direction = "counter_clockwise", ceiling: float = 200.0):
    """Worst-hop isolation 10 log10(|S_circ|^2/|S_supp|^2) over the three hops."""
    s = dynamics.scattering_array(net, omegas)
    circ, supp = hop_pairs(direction)
    out = []
    for (o, i), (so, si) in zip(circ, [(i, o) for o, i in circ]):
        a = np.abs(s[:, o, i]) ** 2
        b = np.abs(s[:, so, si]) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            db = 10.0 * np.log10(a / b)
        db = np.where((a == 0) & (b == 0), 0.0, db)
        out.append(np.clip(np.nan_to_num(db, posinf=ceiling, neginf=-ceiling), -ceiling, ceiling))
    return np.min(out, axis=0)


def isolation_bandwidth(
    net: NetworkSpec,
    threshold_db: float = 20.0,
    direction: Direction = "counter_clockwise",
    window: float | None = None,
) -> Band:
    """Contiguous band around omega = 0 where every hop isolates above threshold.

    The default search window is twice the largest cavity linewidth; a
    threshold never reached at omega = 0 gives ``met=False`` and zero width.
    """
    if window is None:
        window = 2.0 * max(c.kappa for c in net.cavities)
    metric = lambda w: isolation_margin_db(net, w, direction)
    return threshold_band(metric, threshold_db, window, points=4001)
