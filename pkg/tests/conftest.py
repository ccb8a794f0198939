import warnings
from dataclasses import replace

import numpy as np
import pytest

from hmortar import assemble_system, default_config, precompute_schur
from hmortar.machine import sinusoidal_slot_currents


def small_config(**changes):
    """Coarse six-pole, 36-slot machine for quick tests."""
    cfg = replace(default_config(), angular_divisions_rotor=60, angular_divisions_stator=144,
                  multiplier_degree=10)
    return replace(cfg, **changes)


def excited(cfg, amplitude=3e6, phase=0.4):
    return replace(cfg, current_density=sinusoidal_slot_currents(cfg, amplitude, phase))


@pytest.fixture(scope="session")
def small_cfg():
    return small_config()


@pytest.fixture(scope="session")
def small_sys(small_cfg):
    return assemble_system(small_cfg)


@pytest.fixture(scope="session")
def small_pre(small_sys):
    return precompute_schur(small_sys)


@pytest.fixture(scope="session")
def excited_sys():
    return assemble_system(excited(small_config()))


@pytest.fixture(scope="session")
def excited_pre(excited_sys):
    return precompute_schur(excited_sys)


@pytest.fixture(scope="session")
def default_sys():
    return assemble_system(default_config())


@pytest.fixture(scope="session")
def default_pre(default_sys):
    return precompute_schur(default_sys)


@pytest.fixture(scope="session")
def symmetric_sys():
    """Uniform vacuum, no magnets, equal current in every slot: rotationally symmetric."""
    cfg = small_config(mu_r_iron=1.0, mu_r_magnet=1.0, b_remanence=0.0, slot_coverage=1.0,
                       current_density=(2e6,) * 36)
    return assemble_system(cfg)


@pytest.fixture(autouse=True)
def _quiet_stability_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=UserWarning)
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
