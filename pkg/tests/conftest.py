import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and short title")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = _CRITERIA.get(report.nodeid)
    if marker is None:
        return
    n, title = marker
    ok = report.outcome == "passed"
    if report.outcome == "skipped":
        return
    prev = _RESULTS.get(n, (title, True))
    _RESULTS[n] = (title, prev[1] and ok)


_CRITERIA = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _CRITERIA[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        title, ok = _RESULTS[n]
        terminalreporter.write_line(f"[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {title}")
