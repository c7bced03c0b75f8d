import os
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from inverse_power.enumeration import iter_games

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", help="run the optional multi-hour checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="optional slow check; use --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@lru_cache(maxsize=None)
def games_of(game_class: str, n: int) -> tuple:
    """Enumerated games, shared by every test in the session."""
    return tuple(iter_games(game_class, n))


@pytest.fixture(scope="session")
def games():
    return games_of


# acceptance criteria report: filled by tests/test_acceptance.py
CRITERIA: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        ok, detail = CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
