import os

import pytest

from planes.isotopy import isotopy_classes
from planes.search import prove_order, write_bundle

EXTENDED = os.environ.get("PLANES_EXTENDED") == "1"


def pytest_configure(config):
    config.criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (report.when != "call" and report.passed):
        return
    key, text = mark.args
    status = "SKIP" if report.skipped else "PASS" if report.passed else "FAIL"
    results = item.config.criteria.setdefault(key, [text, []])
    results[1].append(status)
    line = f"{status} criterion {key}: {text}"
    reporter = item.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None:
        reporter.write_line(line)


def pytest_terminal_summary(terminalreporter, config):
    if not config.criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key, (text, statuses) in sorted(config.criteria.items()):
        if "FAIL" in statuses:
            status = "FAIL"
        elif "PASS" in statuses:
            status = "PASS"
        else:
            status = "SKIP"
        terminalreporter.write_line(f"{status} criterion {key}: {text}")


def pytest_collection_modifyitems(config, items):
    if EXTENDED:
        return
    skip = pytest.mark.skip(reason="extended run; set PLANES_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def catalogue5():
    return isotopy_classes(5)


@pytest.fixture(scope="session")
def catalogue6():
    return isotopy_classes(6)


@pytest.fixture(scope="session")
def proof5():
    return prove_order(5, isotopy_classes(4))


@pytest.fixture(scope="session")
def proof6(catalogue5):
    return prove_order(6, catalogue5)


@pytest.fixture(scope="session")
def proof7(catalogue6):
    return prove_order(7, catalogue6, jobs=int(os.environ.get("PLANES_JOBS", "1")))


@pytest.fixture(scope="session")
def bundle5(proof5, tmp_path_factory):
    return write_bundle(proof5, tmp_path_factory.mktemp("b5") / "run5")


@pytest.fixture(scope="session")
def bundle6(proof6, tmp_path_factory):
    return write_bundle(proof6, tmp_path_factory.mktemp("b6") / "run6")


@pytest.fixture(scope="session")
def bundle7(proof7, tmp_path_factory):
    return write_bundle(proof7, tmp_path_factory.mktemp("b7") / "run7")
