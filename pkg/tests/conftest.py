import json
from pathlib import Path

import pytest

from apmub.block_designs import ResolvableDesign

DATA = Path(__file__).parent / "data"


def load_design(name: str) -> ResolvableDesign:
    return ResolvableDesign.from_json(json.loads((DATA / name).read_text()))


@pytest.fixture
def data_dir() -> Path:
    return DATA


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n:>2}: {text}")
