"""Shared test config: collects one-line verdicts from the acceptance
suite and prints them as a block at the end of the run."""

ACCEPTANCE = {}


def record_criterion(number: int, label: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = (label, ok, detail)
    assert ok, f"criterion {number} ({label}): {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        label, ok, detail = ACCEPTANCE[number]
        verdict = "PASS" if ok else "FAIL"
        suffix = f" -- {detail}" if detail else ""
        tr.write_line(f"criterion {number:2d} [{verdict}] {label}{suffix}")
