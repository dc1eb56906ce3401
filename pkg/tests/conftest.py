from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# (criterion, passed, detail) lines collected by test_acceptance.py
ACCEPTANCE_LOG = []


@pytest.fixture
def fixtures():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_LOG:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
