"""Shared reporting for the acceptance suite.

Acceptance tests record one line per criterion; the terminal-summary hook
prints them after the run so the verdicts are visible regardless of pytest's
per-test output capturing.
"""

_criterion_lines: list[tuple[int, str]] = []


def record_criterion(number: int, title: str, passed: bool):
    verdict = "PASS" if passed else "FAIL"
    _criterion_lines.append((number, f"criterion {number}: {title}: {verdict}"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_criterion_lines):
        terminalreporter.write_line(line)
