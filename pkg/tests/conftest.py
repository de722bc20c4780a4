from pathlib import Path

import pytest

from polyloop.loopfront import parse_loop

LOOPS = Path(__file__).resolve().parent.parent / "loops"


def load(name):
    return parse_loop((LOOPS / name).read_text())


@pytest.fixture
def loops_dir():
    return LOOPS


@pytest.fixture
def squares():
    with pytest.warns(UserWarning):
        return load("squares.loop")


@pytest.fixture
def broken():
    return load("broken.loop")


@pytest.fixture
def odd_sum():
    return load("odd_sum.loop")


@pytest.fixture
def odd_sum3():
    return load("odd_sum3.loop")


# -- acceptance reporting ---------------------------------------------------

CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    n, title = mark.args
    ok, _ = CRITERIA.get(n, (True, title))
    if rep.when == "call" or rep.failed:
        CRITERIA[n] = (ok and not rep.failed, title)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, title = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
