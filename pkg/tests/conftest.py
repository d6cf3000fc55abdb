import numpy as np
import pytest

from gaphilbert import GapGeometry, Surface, ThetaContext
from gaphilbert.pipeline import Pipeline, RunConfig

ASYMMETRIC = (-3.0, -2.2, -1.0, 0.5, 1.7, 3.1)

ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def pipe():
    return Pipeline(RunConfig())


@pytest.fixture(scope="session")
def geo(pipe):
    return pipe.geometry


@pytest.fixture(scope="session")
def surface(pipe):
    return pipe.surface


@pytest.fixture(scope="session")
def spectral(pipe):
    return pipe.spectral


@pytest.fixture(scope="session")
def ctx(pipe):
    return pipe.theta_ctx


@pytest.fixture(scope="session")
def asym_pipe():
    return Pipeline(RunConfig(endpoints=list(ASYMMETRIC)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
