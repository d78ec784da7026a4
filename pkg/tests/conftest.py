"""Shared pytest plumbing for the suite.

Collects the one-line verdicts emitted by the acceptance tests and prints
them in the terminal summary, where pytest's output capture no longer
swallows them.
"""

acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance verdicts")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
