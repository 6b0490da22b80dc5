from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest

from procperf.metrics import EvalSet, Sample

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def small_eval() -> EvalSet:
    """Three samples over four classes, including an all-tied row."""
    return EvalSet(
        4,
        (
            Sample("a", 1, (0.1, 0.5, 0.3, 0.1)),
            Sample("b", 2, (0.4, 0.3, 0.2, 0.1)),
            Sample("c", 0, (0.25, 0.25, 0.25, 0.25)),
        ),
    )


@pytest.fixture
def small_curve_fracs():
    return [0, Fraction(2, 3), Fraction(2, 3), 1, 1]


@pytest.fixture
def write(tmp_path: Path):
    def _write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path

    return _write


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
