"""Shared test plumbing.

The acceptance tests register one line per criterion here; the summary
hook prints them at the end of the run so the pass/fail status of each
criterion is visible regardless of capture settings.
"""

acceptance_lines: list[str] = []


def record_acceptance(num: int, description: str, ok: bool, elapsed: float | None = None) -> None:
    status = "PASS" if ok else "FAIL"
    timing = f" ({elapsed:.1f}s)" if elapsed is not None else ""
    acceptance_lines.append(f"criterion {num:2d}: {status}{timing} - {description}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(acceptance_lines):
        terminalreporter.write_line(line)
