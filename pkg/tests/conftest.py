import sys
from pathlib import Path

# make the oracle module importable from every test file
sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if not LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(LINES):
        terminalreporter.write_line(LINES[n])
