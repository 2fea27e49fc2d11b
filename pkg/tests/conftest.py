import numpy as np
import pytest

from entpow import IntegratorConfig, validate_constellation


@pytest.fixture
def bpsk():
    return validate_constellation([[1.0], [-1.0]], [0.5, 0.5])


@pytest.fixture
def point2d():
    # deterministic signal: a single atom in R^2
    return validate_constellation([[0.5, -1.0]], [1.0])


@pytest.fixture
def product_bpsk_2d():
    # two independent antipodal coordinates
    pts = [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]
    return validate_constellation(pts, [0.25] * 4)


@pytest.fixture
def quad_cfg():
    return IntegratorConfig(order=48)


@pytest.fixture
def fast_cfg():
    return IntegratorConfig(order=24)


def random_constellation(seed, n=None, k=None, spread=2.5):
    """Seeded random constellation used across the suite."""
    rng = np.random.default_rng(seed)
    if n is None:
        n = int(rng.integers(1, 4))
    if k is None:
        k = int(rng.integers(2, 9))
    pts = rng.uniform(-spread, spread, size=(k, n))
    probs = rng.dirichlet(np.ones(k))
    return validate_constellation(pts, probs)


def random_lambda(seed, n, low=0.1, high=3.0):
    rng = np.random.default_rng(seed + 10_000)
    return rng.uniform(low, high, size=n)
