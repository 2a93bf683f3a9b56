import pytest

from tsystems.groups import load_group

_CACHE = {}


def group(spec):
    if spec not in _CACHE:
        _CACHE[spec] = load_group(spec)
    return _CACHE[spec]


@pytest.fixture(scope="session")
def A5():
    return group("A5")


@pytest.fixture(scope="session")
def S4():
    return group("S4")


@pytest.fixture(scope="session")
def V4():
    return group("C2xC2")


@pytest.fixture(scope="session")
def S3():
    return group("S3")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
