import numpy as np
import pytest
from hypothesis import settings

from hcbloch.geometry import InclusionShape
from hcbloch.pipeline import build_model

settings.register_profile("repo", deadline=None, max_examples=40)
settings.load_profile("repo")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def sphere():
    return InclusionShape.sphere(0.25)


@pytest.fixture(scope="session")
def model_a(sphere):
    """alpha = (1, 0, 0), N = 2, snapped at 0.2."""
    return build_model(sphere, (1.0, 0.0, 0.0), 2, 0.2)


@pytest.fixture(scope="session")
def model_0(sphere):
    return build_model(sphere, (0.0, 0.0, 0.0), 2, 0.2)


@pytest.fixture(scope="session")
def model_0_n3(sphere):
    return build_model(sphere, (0.0, 0.0, 0.0), 3, 0.2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
