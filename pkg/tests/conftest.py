import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lsg.grids import RadialGrid
from lsg.rootsystem import build_root_system

settings.register_profile(
    "lsg",
    deadline=None,
    derandomize=True,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("lsg")


@pytest.fixture(scope="session")
def a1():
    return build_root_system("A1")


@pytest.fixture(scope="session")
def a2():
    return build_root_system("A2")


@pytest.fixture(scope="session")
def b2():
    return build_root_system("B2")


@pytest.fixture(scope="session")
def g2():
    return build_root_system("G2")


@pytest.fixture(scope="session")
def a1_grid():
    return RadialGrid(1, 12.0, 512)


@pytest.fixture(scope="session")
def a2_grid():
    return RadialGrid(2, 9.0, 96)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
