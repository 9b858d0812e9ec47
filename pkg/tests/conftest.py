"""Shared pytest configuration.

Registers a deterministic hypothesis profile and collects the one-line
verdicts emitted by the acceptance tests so they are printed in the
terminal summary even when output capturing is on.
"""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=200,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

# test_acceptance appends "[PASS]/[FAIL] C<n> ..." lines here
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
