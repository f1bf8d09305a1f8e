from __future__ import annotations

import numpy as np
import pytest


def philox(*key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=list(key)))


@pytest.fixture
def rng() -> np.random.Generator:
    return philox(2024, 0)


# Acceptance verdicts, filled by tests/test_acceptance.py and printed at the
# end of the session so they show up without ``-s``.
ACCEPTANCE: dict = {}


def record(number: int, passed: bool, detail: str) -> bool:
    line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
