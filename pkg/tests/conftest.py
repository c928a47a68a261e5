from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from liewave.groups import GroupSpec

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")

SMALL_SPECS = {
    "T1": GroupSpec.torus(1, 16),
    "T3": GroupSpec.torus(3, 4),
    "SU2": GroupSpec.su2(6),
}


@pytest.fixture(params=sorted(SMALL_SPECS))
def spec(request):
    return SMALL_SPECS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Collects one PASS/FAIL line per acceptance criterion for the summary."""

    def report(number: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
