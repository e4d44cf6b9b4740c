import pytest

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one acceptance line and fail the test when the check fails."""

    def record(number, title, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title} ({detail})"
        _VERDICTS.append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
