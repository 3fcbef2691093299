import pytest

_LINES = []


class _Recorder:
    def __call__(self, number, ok, detail, seconds, limit):
        ok = bool(ok) and seconds < limit
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}  [{seconds:.3f}s < {limit}s]"
        _LINES.append((number, line))
        print(line)
        return ok


@pytest.fixture
def criterion():
    """Record one acceptance line; returns whether it passed (runtime included)."""
    return _Recorder()


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
