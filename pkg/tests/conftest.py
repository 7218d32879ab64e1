import pytest

from forestdelta import corpus
from forestdelta.algebra import build_transition_algebra
from forestdelta.decide import prepare


@pytest.fixture(scope="session")
def f1():
    return build_transition_algebra(corpus.some_a())


@pytest.fixture(scope="session")
def f2():
    return build_transition_algebra(corpus.chain_abc())


@pytest.fixture(scope="session")
def pipelines():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = prepare(corpus.find_entry(name).spec)
        return cache[name]

    return get


# one PASS/FAIL line per acceptance criterion, printed in the terminal summary

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or report.outcome == "failed":
        number, title = marker
        previous = _criteria.get(number, (title, True))[1]
        _criteria[number] = (title, previous and report.outcome == "passed")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
