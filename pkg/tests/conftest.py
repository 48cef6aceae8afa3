import json
import sys
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))

_criteria: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def golden():
    return json.loads((DATA / "table1_golden.json").read_text())


@pytest.fixture
def record_criterion():
    """Record a pass/fail line for the acceptance summary."""
    def record(label: str, ok: bool, detail: str = ""):
        _criteria.append((label, ok, detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
