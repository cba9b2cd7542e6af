import pytest
from hypothesis import HealthCheck, settings

from steiner_shortcuts.attack import build_attack
from steiner_shortcuts.hesse import HesseParams, build_family
from steiner_shortcuts.wxx import WxxParams, build_wxx, build_wxx_attack

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SMALL = HesseParams(k=2, d=1, r=2, ell=2)


@pytest.fixture(scope="session")
def small_family():
    return build_family(SMALL)


@pytest.fixture(scope="session")
def small_attack(small_family):
    g, crit = small_family
    return g, crit, build_attack(SMALL, g)


@pytest.fixture(scope="session")
def wxx_r2():
    g, crit = build_wxx(WxxParams(2))
    return g, crit, build_wxx_attack(g)


# criterion number -> (passed, one-line detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
