from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from models.ccp_instance import CcpInstance
from models.instance_io import load_instance

DATA_DIR = Path(__file__).resolve().parent.parent / 'data' / 'instances'
EXAMPLE1_PATH = DATA_DIR / 'example1.json'


@pytest.fixture
def example1() -> CcpInstance:
    return load_instance(EXAMPLE1_PATH)


@pytest.fixture
def example1_path() -> Path:
    return EXAMPLE1_PATH


def random_instance(seed: int, n_max: int = 10, m_max: int = 3, d_max: int = 3) -> CcpInstance:
    """Small integer instance with a nonnegative technology matrix and positive costs"""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    d = int(rng.integers(1, d_max + 1))
    T = rng.integers(0, 3, size=(m, d)).astype(float)
    for k in range(m):
        if not T[k].any():
            T[k, int(rng.integers(d))] = 1.0
    weights = rng.integers(1, 4, size=n)
    total = int(weights.sum())
    probs = tuple(Fraction(int(w), total) for w in weights)
    epsilon = Fraction(int(rng.integers(1, total)), total)
    return CcpInstance(
        name=f'random-{seed}',
        c=rng.integers(1, 6, size=d).astype(float),
        T=T,
        scenarios=rng.integers(0, 10, size=(n, m)).astype(float),
        probs=probs,
        epsilon=epsilon,
    )


@pytest.fixture
def make_random_instance():
    return random_instance


@pytest.fixture
def app():
    from main import create_app
    return create_app({'TESTING': True, 'RATELIMIT_ENABLED': False})


@pytest.fixture
def client(app):
    return app.test_client()
