from __future__ import annotations

import pytest

from tvx.wallcross import InitialData, factorize

_CACHE: dict = {}


def scattering(l1: int, l2: int, order: int):
    """Factorizations are deterministic and immutable, so share them across tests."""
    key = (l1, l2, order)
    if key not in _CACHE:
        _CACHE[key] = factorize(InitialData.plain(l1, l2), order)
    return _CACHE[key]


@pytest.fixture(scope="session")
def scat():
    return scattering


# -- acceptance summary ---------------------------------------------------------------

_CRITERIA: dict[int, tuple[str, bool, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        notes = "; ".join(v for k, v in item.user_properties if k == "note")
        _CRITERIA[number] = (title, rep.passed, notes)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, notes = _CRITERIA[number]
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {title}"
        if notes:
            line += f"  [{notes}]"
        terminalreporter.write_line(line)
