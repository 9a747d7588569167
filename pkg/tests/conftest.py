from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from mvf.difference import DifferenceStructure, Identity
from mvf.groups import ConcreteGroup
from mvf.hahn import FieldHandle

settings.register_profile("mvf", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("mvf")


@pytest.fixture(scope="session")
def g23():
    return ConcreteGroup.of(2, 3)


@pytest.fixture(scope="session")
def k23(g23):
    return FieldHandle(g23)


@pytest.fixture(scope="session")
def m23(k23):
    return DifferenceStructure(k23, Identity())


def pytest_terminal_summary(terminalreporter):
    # one PASS/FAIL line per acceptance criterion, in criterion order
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for i, ok, detail, elapsed in sorted(lines):
            terminalreporter.write_line(f"criterion {i:2d}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s) {detail}")
