import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from loadcd.graph import Dag  # noqa: E402


@pytest.fixture
def localpc_fixture():
    """X -> V1 <- V2, V1 -> Y <- V2, X -> C <- Y: the only blanket-internal separator of X and Y is {V1, V2}."""
    x, v1, v2, y, c = range(5)
    return Dag(5, [(x, v1), (v2, v1), (v1, y), (v2, y), (x, c), (y, c)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
