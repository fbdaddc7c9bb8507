import pytest
from hypothesis import HealthCheck, settings

from chainscope import build_gap_matrix, builtin_system

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def square5():
    s = builtin_system("square", grid_n=5)
    return s, build_gap_matrix(s)


@pytest.fixture(scope="session")
def akin101():
    s = builtin_system("akin", grid_n=101)
    return s, build_gap_matrix(s)


@pytest.fixture(scope="session")
def cycle3():
    s = builtin_system("cycle", n=3)
    return s, build_gap_matrix(s)


@pytest.fixture(scope="session")
def identity3():
    s = builtin_system("identity", grid_n=3)
    return s, build_gap_matrix(s)


@pytest.fixture(scope="session")
def logistic101():
    s = builtin_system("logistic4", grid_n=101)
    return s, build_gap_matrix(s)
