import os

import numpy as np
import pytest

ACCEPTANCE_LINES = []


def seed() -> int:
    return int(os.environ.get("G5_SEED", "0") or 0)


@pytest.fixture
def rng():
    return np.random.default_rng(seed())


@pytest.fixture
def record_criterion():
    """Record one pass/fail line per acceptance criterion for the summary."""

    def record(number, title, passed, detail):
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
