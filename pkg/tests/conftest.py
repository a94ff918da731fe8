import numpy as np
import pytest

from cjwiretap.channel import sample_channel
from cjwiretap.schemes import build_precoders, select_scheme


def setup(cfg, seed=0):
    plan = select_scheme(cfg)
    ch = sample_channel(plan.cfg, seed)
    return ch, plan, build_precoders(ch, plan)


@pytest.fixture
def sym3():
    return setup((3, 3, 3, 2), 0)


@pytest.fixture
def sym1():
    return setup((4, 4, 2, 1), 0)


class UnitPair:
    """Precoder pair stand-in with given column counts and unit columns."""

    def __init__(self, d, l, nt=None, nc=None):
        nt = nt or d
        nc = nc or l
        self.p_t = np.eye(nt, d, dtype=complex)
        self.p_c = np.eye(nc, l, dtype=complex)


class FakePlan:
    def __init__(self, d, l, structured, case_id="x"):
        self.d, self.l, self.g = d, l, l
        self.signaling = "structured" if structured else "gaussian"
        self.structured = structured
        self.case_id = case_id


# acceptance outcomes, filled by test_acceptance and printed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line("criterion {0:2d}: {1}  {2}".format(k, "PASS" if ok else "FAIL", detail))
