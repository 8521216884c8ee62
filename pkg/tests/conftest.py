import pytest
from hypothesis import settings

from stochgas import RiemannData, analytic_profile, make_riemann_profile

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")


@pytest.fixture(scope="session")
def riemann_1101():
    return make_riemann_profile(RiemannData(1.0, 1.0, 0.0, -1.0))


@pytest.fixture(scope="session")
def tanh_profile():
    return analytic_profile("tanh-compression", {"a": 1.0})


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
