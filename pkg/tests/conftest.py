import pytest

from cyqc import verify
from cyqc.dataset import load_dataset

ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def ds():
    return load_dataset()


@pytest.fixture(scope="session")
def first(ds):
    return verify._first(ds)


@pytest.fixture(scope="session")
def second(ds):
    return verify._second(ds)


@pytest.fixture(scope="session")
def threefolds(ds):
    return verify._threefolds(ds)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
