import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from modenet import model
from modenet.errors import DesignInfeasibleError, InvalidParameterError, NotFoundError
from modenet.model import (
    CavityMode,
    Coupling,
    MechanicalMode,
    NetworkSpec,
    PumpSpec,
    apply_cross_damping,
    circulator_preset,
    cooperativity,
    coupling_for_cooperativity,
    effective_linewidth,
    isolator_preset,
    mechanical_susceptibility,
    network_cooperativities,
)

TWO_PI = 2 * math.pi


def test_cooperativity_definition():
    assert cooperativity(0.0, 3.0, 5.0) == 0.0
    g = math.sqrt(3.0 * 5.0) / 2
    assert math.isclose(cooperativity(g, 3.0, 5.0), 1.0)
    assert math.isclose(cooperativity(2.0, 1.0, 4.0), 4.0)


def test_cooperativity_rejects_bad_rates():
    with pytest.raises(InvalidParameterError):
        cooperativity(1.0, 0.0, 1.0)
    with pytest.raises(InvalidParameterError):
        cooperativity(1.0, 1.0, -1.0)


def test_coupling_from_device_cooperativity():
    kappa, gamma = TWO_PI * 0.2e6, TWO_PI * 30
    g = coupling_for_cooperativity(520, kappa, gamma)
    assert math.isclose(g, math.sqrt(520 * kappa * gamma / 4))
    assert math.isclose(g / TWO_PI, 27.9e3, rel_tol=2e-3)
    assert math.isclose(cooperativity(g, kappa, gamma), 520)


@given(
    g0=st.floats(1e-3, 1e3),
    n=st.floats(1e-3, 1e6),
    s=st.floats(1e-2, 1e2),
)
def test_pump_scaling_invariance(g0, n, s):
    a = PumpSpec(g0, n).coupling
    b = PumpSpec(g0 / s, s * s * n).coupling
    assert math.isclose(cooperativity(a, 2.0, 0.5), cooperativity(b, 2.0, 0.5), rel_tol=1e-12)


def test_mechanical_susceptibility_peak():
    gamma = 3.0
    assert np.isclose(mechanical_susceptibility(MechanicalMode("b", gamma), 0.0), 2 / gamma)
    shifted = MechanicalMode("b", gamma, frame_detuning=1.7)
    assert np.isclose(mechanical_susceptibility(shifted, -1.7), 2 / gamma)


def test_mechanical_susceptibility_far_detuned():
    gamma, d = TWO_PI * 30, TWO_PI * 18e3
    chi = mechanical_susceptibility(MechanicalMode("b", gamma, frame_detuning=d), 0.0)
    assert abs(chi - 1j / d) / abs(1j / d) < gamma / (2 * d)


def test_effective_linewidth():
    assert effective_linewidth(2.0, []) == 2.0
    assert effective_linewidth(2.0, [1, 1]) == 6.0
    assert math.isclose(effective_linewidth(TWO_PI * 30, [520, 450]) / TWO_PI, 29.13e3, rel_tol=1e-3)
    with pytest.raises(InvalidParameterError):
        effective_linewidth(0.0, [1])


def _device(kappas=(TWO_PI * 0.2e6, TWO_PI * 3.4e6), gammas=(TWO_PI * 30, TWO_PI * 10), cs=(520, 450, 1350, 1280)):
    pairs = [(0, 0), (1, 0), (0, 1), (1, 1)]
    g = [coupling_for_cooperativity(c, kappas[i], gammas[j]) for c, (i, j) in zip(cs, pairs)]
    return isolator_preset(kappas, gammas, g, TWO_PI * 18e3, 0.3)


def test_cross_damping_effective_cooperativities():
    net = apply_cross_damping(_device(), "b1", TWO_PI * 20e3)
    cs = network_cooperativities(net)
    assert abs(cs[("a1", "b1")] - 0.78) <= 0.01
    assert abs(cs[("a2", "b1")] - 0.68) <= 0.01
    assert math.isclose(cs[("a1", "b1")], 520 * 30 / 20030)
    assert math.isclose(cs[("a2", "b1")], 450 * 30 / 20030)


def test_cross_damping_identity_and_composition():
    net = _device()
    assert apply_cross_damping(net, "b1", 0.0) == net
    twice = apply_cross_damping(apply_cross_damping(net, "b2", 3.0), "b2", 4.5)
    once = apply_cross_damping(net, "b2", 7.5)
    assert math.isclose(twice.mechanical("b2").gamma_m, once.mechanical("b2").gamma_m)
    with pytest.raises(NotFoundError):
        apply_cross_damping(net, "b9", 1.0)
    with pytest.raises(InvalidParameterError):
        apply_cross_damping(net, "b1", -1.0)


def test_isolator_preset_structure():
    net = isolator_preset((1.0, 2.0), (0.1, 0.2), (0.3, 0.4, 0.5, 0.6), 0.7, 0.9)
    assert [c.label for c in net.cavities] == ["a1", "a2"]
    assert net.mechanical("b1").frame_detuning == -0.7
    assert net.mechanical("b2").frame_detuning == 0.7
    assert net.coupling("a2", "b2").phase == -0.9
    assert net.coupling("a1", "b1").phase == 0.0
    g = net.coupling_matrix()
    assert np.allclose(g, [[0.3, 0.5], [0.4, 0.6 * np.exp(-0.9j)]])


def test_isolator_preset_phase_free_is_real():
    net = isolator_preset((1.0, 2.0), (0.1, 0.2), (0.3, 0.4, 0.5, 0.6), 0.7, 0.0)
    assert np.all(net.coupling_matrix().imag == 0)


def test_isolator_preset_rejects_bad_rates():
    with pytest.raises(InvalidParameterError):
        isolator_preset((1.0, -2.0), (0.1, 0.2), (0.3, 0.4, 0.5, 0.6), 0.7, 0.0)
    with pytest.raises(InvalidParameterError):
        isolator_preset((1.0, 2.0), (0.1, 0.2), (0.3, -0.4, 0.5, 0.6), 0.7, 0.0)


def test_circulator_preset_cooperativities():
    beta = math.sqrt(3) / 2
    net = circulator_preset((3.0, 4.0, 5.0), (0.1, 0.2), beta)
    assert math.isclose(model.circulator_cooperativity(beta), 2 / 3)
    for c in network_cooperativities(net).values():
        assert math.isclose(c, 2 / 3)
    assert math.isclose(net.mechanical("b1").frame_detuning, -beta * 0.1)
    assert math.isclose(net.mechanical("b2").frame_detuning, beta * 0.2)
    assert math.isclose(net.coupling("a1", "b1").phase, 2 * math.pi / 3)
    assert math.isclose(net.coupling("a2", "b1").phase, -2 * math.pi / 3)


def test_circulator_preset_bound():
    with pytest.raises(DesignInfeasibleError):
        circulator_preset((1, 1, 1), (0.1, 0.1), model.CIRCULATOR_BETA_BOUND)
    net = circulator_preset((1, 1, 1), (0.1, 0.1), model.CIRCULATOR_BETA_BOUND * (1 + 1e-9))
    assert max(network_cooperativities(net).values()) < 1e-8


def test_circulator_beta_roundtrip():
    for c in (0.1, 1.0, 19.05):
        assert math.isclose(model.circulator_cooperativity(model.circulator_beta(c)), c)


def test_network_validation():
    cav = CavityMode("a", 1.0)
    mech = MechanicalMode("b", 1.0)
    with pytest.raises(InvalidParameterError):
        NetworkSpec((cav, CavityMode("a", 2.0)), (), ())
    with pytest.raises(NotFoundError):
        NetworkSpec((cav,), (mech,), (Coupling("a", "x", 1.0),))
    with pytest.raises(InvalidParameterError):
        NetworkSpec((cav,), (mech,), (Coupling("a", "b", 1.0), Coupling("a", "b", 2.0)))
    with pytest.raises(InvalidParameterError):
        NetworkSpec((), (), ())
    with pytest.raises(InvalidParameterError):
        CavityMode("a", 0.0, 0.0)
    with pytest.raises(InvalidParameterError):
        MechanicalMode("b", 0.0)


def test_coupling_phase_wrapped():
    c = Coupling("a", "b", 1.0, 3 * math.pi)
    assert math.isclose(c.phase, math.pi)
    assert np.isclose(c.value, -1.0)
    with pytest.raises(InvalidParameterError):
        Coupling("a", "b", -1.0)


def test_unit_conversion_roundtrip():
    assert math.isclose(model.to_hz(model.to_angular(18e3)), 18e3)
