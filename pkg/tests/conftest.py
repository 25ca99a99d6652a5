import pytest

_acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _acceptance[marker.args[0]] = (marker.args[1], report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance):
        title, ok = _acceptance[key]
        terminalreporter.write_line(f"AC{key} {'PASS' if ok else 'FAIL'}  {title}")
