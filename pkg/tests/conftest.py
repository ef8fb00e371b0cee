from __future__ import annotations

import pytest

_criteria: dict[str, tuple[int, str]] = {}
_outcomes: dict[int, tuple[str, float]] = {}


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items: list[pytest.Item]) -> None:
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _criteria[item.nodeid] = (mark.args[0], mark.args[1])


def pytest_runtest_logreport(report: pytest.TestReport) -> None:
    if report.nodeid not in _criteria:
        return
    number, _ = _criteria[report.nodeid]
    if report.failed:
        _outcomes[number] = ("FAIL", report.duration)
    elif report.when == "call" and number not in _outcomes:
        _outcomes[number] = ("PASS" if report.passed else "SKIP", report.duration)


def pytest_terminal_summary(terminalreporter) -> None:  # type: ignore[no-untyped-def]
    if not _outcomes:
        return
    titles = {n: t for n, t in _criteria.values()}
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        status, duration = _outcomes[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {titles[number]} ({duration:.2f} s)")
