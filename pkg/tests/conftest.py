import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from curved_nbody.kernels import available_backends

DEFAULT_SEED = 20240229

settings.register_profile(
    "repro",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repro")


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized tests")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed):
    return np.random.default_rng(seed)


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param
