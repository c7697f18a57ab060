import pytest

_ACCEPTANCE: list[tuple[int, bool, str]] = []


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion."""

    def _record(number: int, passed: bool, detail: str) -> None:
        line = f"CRITERION {number}: {'PASS' if passed else 'FAIL'} | {detail}"
        _ACCEPTANCE.append((number, passed, line))
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(line)
