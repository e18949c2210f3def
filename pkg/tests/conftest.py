import numpy as np
import pytest

from WeakSINDy.dictionary import build_spec
from WeakSINDy.ode_bench import make_system, simulate


@pytest.fixture(scope="session")
def lorenz():
    return make_system("lorenz")


@pytest.fixture(scope="session")
def lorenz_clean(lorenz):
    """10 s of clean Lorenz data at 1000 Hz from the benchmark initial state."""
    return simulate(lorenz, None, 10.0, 1000.0)


@pytest.fixture(scope="session")
def quadratic3():
    return build_spec(3, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
