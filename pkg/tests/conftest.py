import pytest

from ptoeplitz import from_trig

# filled by tests/test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def cos2():
    """f(theta) = 2 cos(theta)."""
    return from_trig([(1, 1.0), (-1, 1.0)])
