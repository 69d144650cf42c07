import numpy as np
import pytest

from dwtmark.bench import STANDARD_IMAGES, bundled_image
from dwtmark.fileio import read_image

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and not report.passed):
        ok = report.passed
        prev = _criteria.get(number, (title, True))
        _criteria[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def images():
    return {name: read_image(bundled_image(name)) for name in STANDARD_IMAGES}


@pytest.fixture(scope="session")
def lenna(images):
    return images["lenna"]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
