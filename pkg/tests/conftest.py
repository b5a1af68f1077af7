import pytest

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def report():
    """Record a one-line pass/fail verdict for an acceptance criterion."""

    def _report(key: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}"
        ACCEPTANCE_LINES[key] = line
        print(line)

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k[1:].split()[0])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
