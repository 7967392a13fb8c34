import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    detail = dict(report.user_properties).get("detail", "")
    item.config.stash[_RESULTS].append((number, title, report.passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = sorted(config.stash.get(_RESULTS, []))
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in results:
        line = f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}"
        terminalreporter.write_line(line + (f" -- {detail}" if detail else ""))
    passed = sum(r[2] for r in results)
    terminalreporter.write_line(f"{passed}/{len(results)} criteria pass")
