import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from declip import Signal  # noqa: E402

N_FIG = 128


@pytest.fixture
def fig1_signal():
    n = np.arange(N_FIG)
    return Signal(np.sin(2 * np.pi * n / N_FIG + np.pi / 4))


@pytest.fixture
def twotone_signal():
    n = np.arange(N_FIG)
    return Signal(np.sin(2 * np.pi * n / N_FIG) + 0.25 * np.sin(2 * np.pi * 3 * n / N_FIG))


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Collects one verdict line per acceptance criterion for the terminal summary."""

    def record(criterion, passed, detail=""):
        _ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {criterion}  {detail}".rstrip())

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
