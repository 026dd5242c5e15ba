import pytest

_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record a pass/fail line for an acceptance criterion.

    Usage: ``acceptance(cid, passed, detail)``; the line is printed
    immediately and repeated in the terminal summary.
    """
    def record(cid, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {cid}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
