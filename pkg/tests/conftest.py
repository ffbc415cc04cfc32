import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # re-emit the acceptance lines after capture ends so they are always
    # visible in the terminal output, one line per criterion
    for name in ("tests.test_acceptance", "test_acceptance"):
        mod = sys.modules.get(name)
        if mod is not None and getattr(mod, "RESULTS", None):
            terminalreporter.write_sep("=", "acceptance criteria")
            for line in mod.RESULTS:
                terminalreporter.write_line(line)
            break
