import sys
import zlib
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES = []


@pytest.fixture
def rng(request):
    # stable per-test seed so parametrized cases draw independent streams
    return np.random.default_rng(zlib.crc32(request.node.name.encode()))


@pytest.fixture
def chain5():
    """5-node directed chain, edge i -> i+1 with unit weight."""
    return np.diag(np.ones(4), -1)


@pytest.fixture
def record():
    """Print and keep one acceptance line; returns the pass flag."""

    def _record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" | {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
