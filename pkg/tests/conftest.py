"""Shared test plumbing: the acceptance-criterion result banner."""

_CRITERION_LINES = {}


def record_criterion(num: int, passed: bool, detail: str) -> None:
    """Stash one pass/fail line; printed in the terminal summary."""
    _CRITERION_LINES[num] = (passed, detail)
    status = "PASS" if passed else "FAIL"
    print(f"[criterion {num:2d}] {status}  {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERION_LINES):
        passed, detail = _CRITERION_LINES[num]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[criterion {num:2d}] {status}  {detail}")
