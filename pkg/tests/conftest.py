import pytest
from hypothesis import HealthCheck, settings

from quadbayes import _kernels

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile (or load from cache) every jitted kernel once, so timed
    # tests measure steady-state behaviour
    _kernels.warmup()
