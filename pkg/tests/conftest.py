import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qpbo.fields import Lattice, golden_omega

settings.register_profile(
    "ci", max_examples=25, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@pytest.fixture(scope="session")
def omega():
    return golden_omega()


@pytest.fixture(scope="session")
def lat8(omega):
    return Lattice(8, 32, omega)


@pytest.fixture(scope="session")
def lat4(omega):
    return Lattice(4, 10, omega)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260809)
