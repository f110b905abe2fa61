import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from crossnorm import INF, LpSpace

settings.register_profile(
    "crossnorm",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("crossnorm")

EXPONENTS = (1.0, 1.5, 2.0, 3.0, INF)


@pytest.fixture
def rng():
    return np.random.default_rng(20260101)


def l2(n):
    return LpSpace(n, 2.0)
