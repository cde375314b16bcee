import pytest

from trapsym.onebody import Grid, TrapSpec, solve_one_body

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def harmonic():
    return solve_one_body(TrapSpec("harmonic"), Grid(-10.0, 10.0, 2001), 20)


@pytest.fixture(scope="session")
def double_well():
    return solve_one_body(TrapSpec("double_well"), Grid(-6.0, 6.0, 1201), 20)


@pytest.fixture(scope="session")
def box():
    return solve_one_body(TrapSpec("infinite_well", width=3.0), Grid(-2.0, 2.0, 1201), 20)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
