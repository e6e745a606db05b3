import pytest

from xcsp21 import fixtures, xmltree
from xcsp21.document import load_instance


def body(xml: str):
    """Mixed content of ``<b>xml</b>``, as the loader would hand it over."""
    return xmltree.parse(f"<b>{xml}</b>").children


def fixture_instance(name: str):
    instance, _ = load_instance(fixtures.read(name))
    return instance


@pytest.fixture(scope="session")
def queens():
    return fixture_instance("queens-extension")


@pytest.fixture(scope="session")
def queens_int():
    return fixture_instance("queens-intension")


@pytest.fixture(scope="session")
def wcsp():
    return fixture_instance("wcsp-example")


@pytest.fixture(scope="session")
def magic():
    return fixture_instance("magic-square")


# -- acceptance summary: one PASS/FAIL line per criterion --------------------------------

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    number, title = marker.args
    verdict = "PASS" if report.passed else "FAIL"
    if _criteria.get(number, ("", "PASS"))[1] != "FAIL":
        _criteria[number] = (title, verdict)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, verdict = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
