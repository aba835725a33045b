import pytest

from kylelab.model import ModelParams

# frozen reference values, computed once with mpmath at 40 digits from the closed forms
PHI1_UNIT = 0.63654494943373272379  # market-maker intercept, branch 1, mu=0, gamma=sigma=rho=1
GOLDEN = 1.6180339887498948482  # lambda* at gamma=sigma=rho=1
ALPHA1_0_BRANCH2 = 0.39169683394179655443  # alpha1(0), lambda=rho=sigma=1, branch 2
PI_1 = 1.2432444217404421497
CA_INSIDER_UTILITY = 0.27949661780135226
CA_STRATEGIC_UTILITY = 0.12927425406113563139


@pytest.fixture
def unit_params():
    return ModelParams(mu=0.0, gamma=1.0, sigma=1.0, rho=1.0)


@pytest.fixture
def odd_params():
    return ModelParams(mu=0.3, gamma=2.0, sigma=0.5, rho=0.7)


@pytest.fixture
def threads(monkeypatch):
    def set_threads(n):
        monkeypatch.setenv("KYLELAB_THREADS", str(n))

    return set_threads


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
