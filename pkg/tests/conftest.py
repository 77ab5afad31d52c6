import pytest

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key = marker.args
    failed = report.failed
    if report.when == "call" or failed:
        _criteria[key] = _criteria.get(key, True) and not failed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(_criteria.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}")
