from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from genmp import generators  # noqa: E402
from genmp.game import validate_game  # noqa: E402

# acceptance lines, printed in the terminal summary
ACCEPTANCE: list[str] = []


@pytest.fixture
def fig_frequency():
    return validate_game(generators.fig_frequency())


@pytest.fixture
def fig_not_connected():
    return validate_game(generators.fig_not_connected())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
