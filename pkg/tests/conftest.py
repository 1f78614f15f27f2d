import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dioph_adiabatic import BoundaryCondition, CoherentParams, FockSpace, parse  # noqa: E402


@pytest.fixture
def linear_poly():
    return parse("x1 - 2")


@pytest.fixture
def antiperiodic_space():
    def make(cutoff, c=1.0):
        return FockSpace(1, cutoff, BoundaryCondition.antiperiodic(c))
    return make


@pytest.fixture
def unit_alpha():
    return CoherentParams((1.0,))


ALL_BCS = [
    BoundaryCondition.abrupt(),
    BoundaryCondition.periodic(1.0),
    BoundaryCondition.antiperiodic(1.0),
    BoundaryCondition.periodic(2j),
    BoundaryCondition.antiperiodic(0.5 - 0.3j),
]


_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion_line():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(name: str, ok: bool, detail: str = ""):
        _ACCEPTANCE.append((name, bool(ok), detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
