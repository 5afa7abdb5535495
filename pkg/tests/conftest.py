"""Shared pytest hooks."""
import sys


def pytest_terminal_summary(terminalreporter):
    # surface the one-line-per-criterion acceptance report even when
    # output capture hides in-test prints
    for name in ("tests.test_acceptance", "test_acceptance"):
        mod = sys.modules.get(name)
        if mod is not None and getattr(mod, "_LINES", None):
            terminalreporter.section("acceptance report")
            for line in mod._LINES:
                terminalreporter.write_line(line)
            break
