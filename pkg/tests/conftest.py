import re

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_results: dict[int, tuple[str, str, float]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    num, label = int(m.group(1)), m.group(2).replace("_", " ")
    if report.when == "call" or report.failed:
        status = "PASS" if report.passed else "FAIL"
        prev = _results.get(num)
        if prev is None or prev[1] == "PASS":
            _results[num] = (label, status, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        label, status, secs = _results[num]
        terminalreporter.write_line(f"Criterion {num} ({label}): {status} [{secs:.2f}s]")
