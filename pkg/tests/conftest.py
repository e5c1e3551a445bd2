"""Collects acceptance outcomes and prints one line per criterion at the end."""

from collections import defaultdict

import pytest

_outcomes: dict[int, list[tuple[str, str]]] = defaultdict(list)
_titles: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    report = outcome.get_result()
    if marker is None:
        return
    number, title = marker.args
    _titles[number] = title
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes[number].append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _titles:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_titles):
        results = _outcomes[number]
        states = {s for _, s in results}
        ok = sum(s == "passed" for _, s in results)
        if states == {"skipped"}:
            verdict = "SKIP"
        else:
            verdict = "PASS" if states == {"passed"} else "FAIL"
        failed = [name for name, s in results if s == "failed"]
        detail = f"{ok}/{len(results)} checks passed"
        if failed:
            detail += "; failing: " + ", ".join(failed)
        tr.write_line(f"criterion {number} [{verdict}] {_titles[number]} ({detail})")
