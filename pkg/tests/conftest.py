import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# Single-core box: generous deadlines, modest example counts.
settings.register_profile(
    "supfield",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("supfield")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
