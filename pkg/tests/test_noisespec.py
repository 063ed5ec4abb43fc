import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_network
from modenet import dynamics, noisespec
from modenet.errors import DesignInfeasibleError, InvalidParameterError, NotFoundError
from modenet.isolator import IsolatorParams, delta_for_cooperativity
from modenet.model import CavityMode, MechanicalMode, NetworkSpec
from modenet.noisespec import OccupationSet

TWO_PI = 2 * math.pi
KAPPA = TWO_PI * 200e3
GAMMA = TWO_PI * 20


def design_params(c):
    return IsolatorParams.design_point(GAMMA, delta_for_cooperativity(c, GAMMA), KAPPA, KAPPA)


def test_vacuum_in_vacuum_out(rng):
    net = random_network(rng)
    w = np.linspace(-3, 3, 31)
    assert np.allclose(noisespec.noise_array(net, w, OccupationSet()), 0.5, atol=1e-12)


def test_hot_internal_bath_hidden_when_overcoupled():
    net = NetworkSpec((CavityMode("a", 1.0, 0.0, bath_occupation=1.0),), (), ())
    assert math.isclose(noisespec.output_noise(net, None, 0.0, "a"), 0.5)
    lossy = NetworkSpec((CavityMode("a", 1.0, 1.0, bath_occupation=1.0),), (), ())
    # critically coupled: the internal bath is fully transmitted at resonance
    assert math.isclose(noisespec.output_noise(lossy, None, 0.0, "a"), 1.5)


def test_hot_external_line_reflected():
    net = NetworkSpec((CavityMode("a", 1.0, 0.5),), (), ())
    occ = OccupationSet(external={"a": 2.0})
    s = dynamics.scattering(net, 0.0).s
    expected = abs(s[0, 0]) ** 2 * 2.5 + abs(s[0, 1]) ** 2 * 0.5
    assert math.isclose(noisespec.output_noise(net, occ, 0.0, "a"), expected)


def test_noise_uses_negative_frequency():
    net = NetworkSpec((CavityMode("a", 1.0),), (MechanicalMode("b", 0.1, frame_detuning=0.4),), ())
    from modenet.model import Coupling

    net = NetworkSpec(net.cavities, net.mechanicals, (Coupling("a", "b", 0.2),))
    occ = OccupationSet(mechanical={"b": 10.0})
    s = dynamics.scattering(net, -0.4).s
    expected = np.sum(np.abs(s[0]) ** 2 * np.array([0.5, 0.5, 10.5]))
    assert math.isclose(noisespec.output_noise(net, occ, 0.4, "a"), expected, rel_tol=1e-12)
    assert noisespec.output_noise(net, occ, 0.4, "a") > noisespec.output_noise(net, occ, -0.4, "a")


def test_unknown_labels():
    net = NetworkSpec((CavityMode("a", 1.0),), (MechanicalMode("b", 0.1),), ())
    with pytest.raises(NotFoundError):
        noisespec.output_noise(net, None, 0.0, "b")
    with pytest.raises(NotFoundError):
        noisespec.output_noise(net, OccupationSet(mechanical={"zz": 1.0}), 0.0, "a")
    with pytest.raises(InvalidParameterError):
        OccupationSet(mechanical={"b": -1.0})


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), omega=st.floats(-5, 5), hot=st.floats(0, 1e3))
def test_vacuum_floor(seed, omega, hot):
    rng = np.random.default_rng(seed)
    net = random_network(rng)
    occ = OccupationSet(mechanical={m.label: hot * rng.random() for m in net.mechanicals})
    assert np.all(noisespec.noise_array(net, [omega], occ) >= 0.5 - 1e-10)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), omega=st.floats(-5, 5), n=st.floats(0, 100))
def test_noise_conservation_equal_baths(seed, omega, n):
    net = random_network(np.random.default_rng(seed))
    s = dynamics.scattering(net, -omega).s
    n_in = np.full(s.shape[1], n + 0.5)
    out = np.abs(s) ** 2 @ n_in
    assert abs(out.sum() - n_in.sum()) < 1e-9 * n_in.sum()


@pytest.mark.parametrize("c", [1, 10, 100])
def test_forward_backward_closed_form(c):
    net = design_params(c).to_network((800, 800))
    n_fw, n_bw = noisespec.forward_backward_noise(800, 800, c)
    assert abs(noisespec.output_noise(net, None, 0.0, "a2") / n_fw - 1) < 1e-6
    assert abs(noisespec.output_noise(net, None, 0.0, "a1") / n_bw - 1) < 1e-6


def test_forward_backward_values():
    assert noisespec.forward_backward_noise(0, 0, 3.0) == (0.5, 0.5)
    assert noisespec.forward_backward_noise(800, 800, 10) == (40.5, 800.5)
    assert noisespec.forward_backward_noise(800, 800, 1e12)[0] == pytest.approx(0.5)
    with pytest.raises(DesignInfeasibleError):
        noisespec.forward_backward_noise(1, 1, 0.3)


def test_backward_exceeds_forward_inside_band():
    net = design_params(10).to_network((800, 800))
    w = np.linspace(-GAMMA, GAMMA, 21)
    n = noisespec.noise_array(net, w)
    assert np.all(n[:, 0] > n[:, 1])


def test_noise_spectrum_container():
    net = design_params(10).to_network((800, 800))
    spec = noisespec.noise_spectrum(net, [0.0, 1.0], "a1")
    assert spec.port == "a1" and spec.quanta.shape == (2,)
    with pytest.raises(InvalidParameterError):
        noisespec.NoiseSpectrum("a1", [0.0], [0.2])


def _schur(a, keep, drop):
    k, d = np.ix_(keep, keep), np.ix_(keep, drop)
    return a[k] - a[d] @ np.linalg.solve(a[np.ix_(drop, drop)], a[np.ix_(drop, keep)])


def test_effective_couplings_match_schur_complement():
    p = IsolatorParams(1.1, 0.7, 0.9, 1.3, 0.6, 0.8, 0.5, 0.3, 2.0, 1.5)
    m = dynamics.assemble(p.to_network()).m
    for w in (-0.4, 0.0, 0.37):
        a = 1j * w * np.eye(4) + m  # order a1, a2, b1, b2
        assert np.isclose(_schur(a, [1, 3], [0, 2])[0, 1], noisespec.effective_coupling_t22(p, w))
        assert np.isclose(_schur(a, [0, 3], [1, 2])[0, 1], noisespec.effective_coupling_t12(p, w))


def test_effective_coupling_limits():
    p = IsolatorParams(0.0, 0.7, 0.9, 1.3, 0.6, 0.8, 0.5, 0.3, 2.0, 1.5)
    assert np.isclose(noisespec.effective_coupling_t22(p, 0.2), -1.3j * np.exp(-0.6j))
    strong = IsolatorParams(1e4, 1e4, 1e4, 1e4, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0)
    assert abs(noisespec.effective_coupling_t22(strong, 0.0)) < 1e-3


def test_eliminated_coupling_reduces_cavity_block():
    p = IsolatorParams(1.1, 0.7, 0.9, 1.3, 0.6, 0.8, 0.5, 0.3, 2.0, 1.5)
    net = p.to_network()
    a = -(1j * 0.37 * np.eye(4) + dynamics.assemble(net).m)
    t = np.array([[noisespec.eliminated_cavity_coupling(net, i, j, 0.37) for j in ("a1", "a2")] for i in ("a1", "a2")])
    reduced = np.diag([2.0 / 2 - 0.37j, 1.5 / 2 - 0.37j]) + 1j * t
    assert np.allclose(_schur(a, [0, 1], [2, 3]), reduced)


def test_eliminated_coupling_simple_cases():
    bare = NetworkSpec((CavityMode("a", 1.0),), (MechanicalMode("b", 0.5),), ())
    assert noisespec.eliminated_cavity_coupling(bare, "a", "a", 0.0) == 0
    from modenet.model import Coupling

    one = NetworkSpec(bare.cavities, bare.mechanicals, (Coupling("a", "b", 0.3),))
    assert np.isclose(noisespec.eliminated_cavity_coupling(one, "a", "a", 0.0), -1j * 0.09 * 2 / 0.5)


def test_eliminated_coupling_is_ratio_numerator():
    p = IsolatorParams(1.1, 0.7, 0.9, 1.3, 0.6, 0.8, 0.5, 0.3, 2.0, 1.5)
    b1, b2 = p.mechanical_modes
    from modenet.model import mechanical_susceptibility as chi

    numerator = p.g11 * chi(b1, 0.0) * p.g21 + p.g12 * chi(b2, 0.0) * p.g22 * np.exp(1j * p.phi)
    assert np.isclose(noisespec.eliminated_cavity_coupling(p.to_network(), "a1", "a2", 0.0), -1j * numerator)


def test_ideal_isolator():
    assert np.allclose(noisespec.ideal_isolator_scattering(0.5), 0)
    assert np.allclose(noisespec.ideal_isolator_scattering(1e12), [[0, 0], [1, 0]])
    assert np.isclose(noisespec.ideal_isolator_scattering(1.0)[1, 0], math.sqrt(0.5))
    with pytest.raises(DesignInfeasibleError):
        noisespec.ideal_isolator_scattering(0.2)


def test_ideal_isolator_matches_numeric():
    c = 7.0
    s = dynamics.external_block(dynamics.scattering(design_params(c).to_network(), 0.0))
    assert np.allclose(np.abs(s), np.abs(noisespec.ideal_isolator_scattering(c)), atol=1e-9)


def test_ideal_backward_noise():
    assert noisespec.ideal_backward_noise(0, 0) == 0.5
    assert noisespec.ideal_backward_noise(800, 800) == 800.5
    for n1, n2, c in [(3, 5, 2.0), (800, 10, 40.0)]:
        assert noisespec.ideal_backward_noise(n1, n2) == noisespec.forward_backward_noise(n1, n2, c)[1]
