"""Shared test setup.

Internal consistency checks (invariant validation of every constructed
system, convexity of every ``db`` output, fixpoint post-checks) are switched
on for the whole run. Acceptance criteria are reported one line each at the
end of the session.
"""
import pytest

from modalnu import _checks

_checks.enable()

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    num, title = marker.args
    ok = report.passed if report.when == "call" else False
    prev = _criteria.get(num, (title, True))
    _criteria[num] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, ok = _criteria[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {title}")
