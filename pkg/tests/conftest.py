import pytest

_VERDICTS: list[str] = []


@pytest.fixture
def record_verdict():
    """Collector for acceptance verdict lines, echoed after the test run."""
    return _VERDICTS.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.line(line)
