import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def report(request):
    """``report(name, ok, detail)`` records one acceptance line and asserts ``ok``."""
    lines = request.config.stash[_LINES]

    def _report(name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {name}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
