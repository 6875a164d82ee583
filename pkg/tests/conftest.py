import pytest

from landmark_metrics import ImageGeometry


@pytest.fixture
def geom():
    return ImageGeometry(64, 64, 8, (1.0, 1.0, 1.0))


# ---- acceptance reporting: one PASS/FAIL line per criterion

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    key = getattr(report, "_acceptance", None)
    if key is None:
        return
    if report.when == "call" or report.failed or report.skipped:
        _acceptance[key] = _acceptance.get(key, True) and report.passed


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("acceptance")
    if m is not None:
        rep._acceptance = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), ok in sorted(_acceptance.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}")
