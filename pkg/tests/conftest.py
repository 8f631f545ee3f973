import pytest

_results: dict[str, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    key = f"{mark.args[0]:>2}. {mark.args[1]}"
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _results.setdefault(key, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results, key=lambda k: int(k.split(".")[0])):
        status = "PASS" if all(_results[key]) else "FAIL"
        terminalreporter.write_line(f"{status}  {key}")
