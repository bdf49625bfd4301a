import functools
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from eofcap import channels as chn

sys.path.insert(0, str(Path(__file__).parent))

CHANNELS = {
    "identity": chn.identity_channel,
    "constant": lambda: chn.constant_channel(np.diag([0.75, 0.25]).astype(complex)),
    "depolarizing_p0.5": lambda: chn.depolarizing(0.5),
    "dephasing_q0.25": lambda: chn.dephasing(0.25),
    "ampdamp_eta0.2": lambda: chn.amplitude_damping(0.2),
    "ampdamp_eta0.3": lambda: chn.amplitude_damping(0.3),
    "ampdamp_eta0.4": lambda: chn.amplitude_damping(0.4),
    "ampdamp_eta0.5": lambda: chn.amplitude_damping(0.5),
}


SOLVE_SECONDS = {}


@functools.lru_cache(maxsize=None)
def solved(name):
    """Channel and its capacity result, solved once per session."""
    ch = CHANNELS[name]()
    start = time.perf_counter()
    res = chn.holevo_capacity(ch)
    SOLVE_SECONDS[name] = time.perf_counter() - start
    return ch, res


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@functools.lru_cache(maxsize=None)
def msw(name, grid=50):
    ch, res = solved(name)
    return chn.msw_crosscheck(ch, grid, capacity=res)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
