import pytest

_VERDICTS: dict[int, tuple[str, bool, list[str]]] = {}


@pytest.fixture
def verdict():
    """Record a criterion's sub-checks, then fail unless all of them hold."""

    def check(number, title, checks):
        ok = all(passed for _, passed, _ in checks)
        lines = [f"{'ok  ' if passed else 'FAIL'} {label}: {detail}" for label, passed, detail in checks]
        _VERDICTS[number] = (title, ok, lines)
        failed = [label for label, passed, _ in checks if not passed]
        assert not failed, f"criterion {number} failed: {', '.join(failed)}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        title, ok, lines = _VERDICTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
        for line in lines:
            terminalreporter.write_line(f"    {line}")
