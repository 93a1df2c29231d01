"""Repeat the acceptance PASS/FAIL lines in the terminal summary."""

_ACCEPTANCE_LINES = []


def pytest_runtest_logreport(report):
    if report.when == "call":
        _ACCEPTANCE_LINES.extend(l for l in report.capstdout.splitlines() if l.startswith("ACCEPTANCE "))


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        key = lambda line: int(line.split()[1])
        for line in sorted(_ACCEPTANCE_LINES, key=key):
            terminalreporter.write_line(line)
