import sys


def pytest_terminal_summary(terminalreporter):
    lines = []
    for module in list(sys.modules.values()):
        lines.extend(getattr(module, "ACCEPTANCE_LINES", []))
    if lines:
        terminalreporter.section("acceptance criteria")
        for text in sorted(lines):
            terminalreporter.write_line(text)
