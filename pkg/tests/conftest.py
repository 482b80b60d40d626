import math

import pytest

from weylhelp import coefficients as C
from weylhelp.weyl import HalfLineProblem, m_eval


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    # first call compiles the stepper; keep that out of timed tests
    m_eval(HalfLineProblem(C.constant(), C.power(2.0, 1.0)), 1j)


@pytest.fixture
def hl():
    return HalfLineProblem(C.constant(), C.constant(), name="hl")


@pytest.fixture
def r2x():
    return HalfLineProblem(C.constant(), C.power(2.0, 1.0), name="r2x")


@pytest.fixture
def chi():
    return C.piecewise([0.0, 1.0, math.inf], [1.0, 0.0], signed=True)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: (int(s.split()[1]), s)):
        terminalreporter.write_line(line)
