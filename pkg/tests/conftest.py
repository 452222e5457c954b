import pytest
from hypothesis import HealthCheck, settings

from strongred import corpus

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def mex():
    return corpus.load("mex")


@pytest.fixture(scope="session")
def cr():
    return corpus.load("cr")


@pytest.fixture(scope="session")
def cr_partial():
    return corpus.load("cr_partial")


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS:
        terminalreporter.write_line(line)
