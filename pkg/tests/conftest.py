import pytest

from popzeta.population import cached_population
from popzeta.primes import FULL, explicit_list, make_list


@pytest.fixture(scope="session")
def M2():
    return make_list(1, 2)


@pytest.fixture(scope="session")
def M2_shift():
    return make_list(2, 2)


@pytest.fixture(scope="session")
def M3():
    return make_list(1, 3)


@pytest.fixture(scope="session")
def P37():
    return explicit_list([3, 7])


@pytest.fixture(scope="session")
def full():
    return FULL


@pytest.fixture(scope="session")
def pop25_1e7(M2):
    return cached_population(M2, 10**7)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
