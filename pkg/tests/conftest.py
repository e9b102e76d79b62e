"""Shared fixtures: the named corpus, loaded once per session."""

import sys

import pytest

from nevlab import corpus


@pytest.fixture(scope="session")
def members():
    return corpus()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Repeat the acceptance verdict lines after the normal report."""
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None) if mod else None
    if lines:
        terminalreporter.write_sep("-", "acceptance")
        for line in lines:
            terminalreporter.write_line(line)
