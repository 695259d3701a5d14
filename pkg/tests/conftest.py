import numpy as np
import pytest

from certilab.config import get_settings
from certilab.utils.hilbert import random_density_matrix, random_state
from certilab.utils.optimizer import OptimizerOptions


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Settings come from the environment only, never from a stray .env"""
    for name in ("CERTILAB_MAX_QUBITS", "CERTILAB_JOBS", "CERTILAB_LOG_LEVEL", "CERTILAB_SEED"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("certilab.config.load_dotenv", lambda *args, **kwargs: False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_states(rng):
    return lambda n, count=1: [random_state(n, rng) for _ in range(count)]


@pytest.fixture
def random_rhos(rng):
    return lambda n, count=1: [random_density_matrix(n, rng) for _ in range(count)]


@pytest.fixture
def quick_opts():
    return OptimizerOptions(restarts=4, max_evaluations=4000, seed=7)
