import sys


def pytest_terminal_summary(terminalreporter):
    # pytest captures the lines printed during the acceptance tests; repeat them here
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ANNOUNCED", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
