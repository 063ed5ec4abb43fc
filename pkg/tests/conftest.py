import math

import numpy as np
import pytest

from modenet.model import CavityMode, Coupling, MechanicalMode, NetworkSpec

TWO_PI = 2 * math.pi


def random_network(rng: np.random.Generator, max_cavities: int = 3, max_mechanicals: int = 3) -> NetworkSpec:
    """Damped network with random rates, detunings, couplings and phases."""
    nc = int(rng.integers(1, max_cavities + 1))
    nm = int(rng.integers(1, max_mechanicals + 1))
    cavities = tuple(
        CavityMode(f"a{i}", kappa_ext=rng.uniform(0.2, 2.0), kappa_int=rng.uniform(0.0, 0.5)) for i in range(nc)
    )
    mechanicals = tuple(
        MechanicalMode(f"b{j}", rng.uniform(0.05, 1.0), frame_detuning=rng.uniform(-2.0, 2.0)) for j in range(nm)
    )
    couplings = tuple(
        Coupling(f"a{i}", f"b{j}", rng.uniform(0.0, 1.5), rng.uniform(-math.pi, math.pi))
        for i in range(nc)
        for j in range(nm)
        if rng.random() < 0.8
    )
    return NetworkSpec(cavities, mechanicals, couplings)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert."""

    def record(number: int, passed: bool, detail: str):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
