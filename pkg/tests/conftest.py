import numpy as np
import pytest

from ciregions.channel import OptimizerConfig
from ciregions.pmf import JointPMF

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line[1])


@pytest.fixture
def record(request):
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    store = request.config.stash[_ACCEPTANCE_KEY]

    def _record(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        store.append((number, line))
        print(line)
        assert ok, line

    return _record


@pytest.fixture
def dsbs():
    return JointPMF.from_array([[0.4, 0.1], [0.1, 0.4]])


@pytest.fixture
def copy_bit():
    return JointPMF.from_array([[0.5, 0.0], [0.0, 0.5]])


@pytest.fixture
def indep():
    return JointPMF.from_array(np.outer([0.3, 0.7], [0.6, 0.4]))


@pytest.fixture
def fast():
    return OptimizerConfig(restarts=8, max_iters=1000)
