import pytest

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or report.failed:
        previous = _criteria.get(number)
        passed = report.passed and (previous is None or previous[0])
        _criteria[number] = (passed, title, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_criteria):
        passed, title, seconds = _criteria[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {number:>2}: {title} ({seconds:.2f}s)")
