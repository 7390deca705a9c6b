import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from src.data.generators import crandn, haar_unitary, stream
from src.utils.config import ENV_KEYS, Tolerances

settings.register_profile(
    "toolkit",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("toolkit")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in list(ENV_KEYS.values()) + ["FT_LOG_LEVEL", "FT_WORKERS"]:
        monkeypatch.delenv(key, raising=False)


@pytest.fixture
def tol():
    return Tolerances()


@pytest.fixture
def rng():
    return stream(20240601)


@pytest.fixture
def nilpotent():
    return np.array([[0, 1], [0, 0]], dtype=np.complex128)


@pytest.fixture
def symmetry():
    return np.diag([1.0, -1.0]).astype(np.complex128)


@pytest.fixture
def random_contraction(rng):
    def make(n: int):
        G = crandn(rng, n, n)
        return G / np.linalg.norm(G, 2)
    return make


@pytest.fixture
def random_unitary(rng):
    return lambda n: haar_unitary(n, rng)
