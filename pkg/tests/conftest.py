import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from orbitkit import sampling

settings.register_profile(
    "orbitkit",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("orbitkit")


@pytest.fixture
def gen():
    return sampling.rng()


def op_norm(x):
    # independent oracle: LAPACK via numpy
    return float(np.linalg.norm(x, 2)) if np.size(x) else 0.0


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
