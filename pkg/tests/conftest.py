import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, max_examples=40, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def gauss(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rel_err(X, Y):
    return np.linalg.norm(X - Y, 2) / max(1.0, np.linalg.norm(Y, 2))


def sample_points(rng, count, lo=0.5, hi=2.0):
    return rng.uniform(lo, hi, count) * np.exp(2j * np.pi * rng.uniform(0, 1, count))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
