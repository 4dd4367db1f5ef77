"""Shared fixtures and the acceptance-criteria summary hook."""

import numpy as np
import pytest

# criterion number -> (description, passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


def record_criterion(number: int, description: str, passed: bool, detail: str = ""):
    ACCEPTANCE_RESULTS[number] = (description, bool(passed), detail)


@pytest.fixture
def criterion_log():
    return record_criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        description, passed, detail = ACCEPTANCE_RESULTS[number]
        verdict = "PASS" if passed else "FAIL"
        line = f"criterion {number:2d} [{verdict}] {description}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    """Throwaway generator for tests that only need arbitrary randomness."""
    return np.random.default_rng(20240817)
