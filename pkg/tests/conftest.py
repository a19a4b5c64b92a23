"""Shared pytest wiring.

test_acceptance.py records one line per acceptance criterion through the
``acceptance`` fixture; the terminal-summary hook prints the collected lines
in one block after the run, so every criterion's pass/fail status is visible
at a glance.  A criterion that errors before reaching its check still gets a
FAIL line.
"""

from __future__ import annotations

import pytest

_RESULTS: dict[str, dict] = {}


@pytest.fixture
def acceptance():
    """Recorder for acceptance outcomes: call with (code, passed, detail)."""

    def _record(code: str, passed: bool, detail: str = "") -> None:
        _RESULTS[code] = {"passed": bool(passed), "detail": detail}
        assert passed, f"{code}: {detail}"

    return _record


def _criterion_code(name: str) -> str | None:
    if not name.startswith("test_a"):
        return None
    digits = ""
    for ch in name[len("test_a"):]:
        if not ch.isdigit():
            break
        digits += ch
    return f"A{int(digits)}" if digits else None


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call" or item.module.__name__ != "test_acceptance":
        return
    code = _criterion_code(item.name)
    if code is None:
        return
    entry = _RESULTS.setdefault(
        code, {"passed": False, "detail": "errored before the check ran"})
    if rep.failed:
        entry["passed"] = False
    entry["duration"] = rep.duration


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for code in sorted(_RESULTS, key=lambda c: int(c[1:])):
        entry = _RESULTS[code]
        status = "PASS" if entry["passed"] else "FAIL"
        timing = f" [{entry['duration']:.1f}s]" if "duration" in entry else ""
        detail = f"  {entry['detail']}" if entry.get("detail") else ""
        terminalreporter.write_line(f"{code} {status}{timing}{detail}")
