from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from stellat.randgen import rng_for

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return rng_for(12345, "tests", 0)


def sample_points(n: int = 100, span: float = 20.0, seed: int = 7) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-span, span, n)
