import random

import pytest

from enmf.field import make_field

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=["exact", "float"])
def field(request):
    return make_field(request.param, tol=1e-9)


@pytest.fixture
def exact():
    return make_field("exact")


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
