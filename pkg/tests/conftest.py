import time
import warnings

import numpy as np
import pytest

from ringspdc.config import reference_config
from ringspdc.constants import wavelength_to_omega
from ringspdc.materials import Material, layered_profile

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def constant(index, name=None):
    return Material(name or f"n{index}", ((index * index - 1.0, 0.0),))


@pytest.fixture(scope="session")
def step_fiber():
    """Non-dispersive step fiber, V about 2.9 at 1.55 um."""
    return layered_profile([6.0], [constant(1.45), constant(1.445)])


@pytest.fixture(scope="session")
def ref_config():
    return reference_config()


@pytest.fixture(scope="session")
def ref_profile(ref_config):
    return ref_config.profile()


@pytest.fixture(scope="session")
def omega_pump():
    return float(wavelength_to_omega(0.775))


@pytest.fixture(scope="session")
def ref_setup(ref_config):
    """Reference setup with every dispersion table built; records its wall time."""
    from ringspdc.pipeline import build_setup

    t0 = time.perf_counter()
    setup = build_setup(ref_config, threads=4)
    setup.build_seconds = time.perf_counter() - t0
    return setup


@pytest.fixture(scope="session")
def ref_spectrum(ref_setup):
    """``(delta_beta_rows, densities, report, seconds)`` for the reference setup."""
    from ringspdc.pipeline import spectrum_run

    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = spectrum_run(ref_setup)
    return (*out, time.perf_counter() - t0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
