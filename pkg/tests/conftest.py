import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from stpulse.simulator import HysteresisCossModel

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def gan_model():
    return HysteresisCossModel.gan_like(loop_area=0.189e-6)


@pytest.fixture(scope="session")
def linear_model():
    return HysteresisCossModel.linear(47e-12, 400.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
