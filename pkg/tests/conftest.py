import numpy as np
import pytest

from intwave.params import PhysicalParams, nondimensionalize

# One line per acceptance criterion, collected while test_acceptance.py runs
# and replayed verbatim in the terminal summary so the verdicts survive even
# when pytest is run without -v.
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance():
    """Recorder used by the acceptance suite: one pass/fail line per criterion."""

    def record(num, passed, detail):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {num:02d}: {status}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def p0():
    """Water-over-brine demo configuration, slightly inside the supercritical range."""
    return PhysicalParams(
        rho_plus=1.0, rho_minus=2.0, d_plus=1.0, d_minus=2.0,
        sigma=0.990099, g=1.0, c=0.7035976,
    )


@pytest.fixture(scope="session")
def nd0(p0):
    return nondimensionalize(p0)


def relerr(got, expected):
    got = np.asarray(got, dtype=float)
    expected = np.asarray(expected, dtype=float)
    denom = np.linalg.norm(expected)
    if denom == 0.0:
        return float(np.linalg.norm(got))
    return float(np.linalg.norm(got - expected) / denom)
