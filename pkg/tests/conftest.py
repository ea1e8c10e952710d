import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion and assert it."""

    def _record(number: int, title: str, clauses: dict[str, tuple[bool, str]]):
        ok = all(flag for flag, _ in clauses.values())
        parts = "; ".join(f"{name}: {'ok' if flag else 'FAIL'} ({info})" for name, (flag, info) in clauses.items())
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title} | {parts}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        failed = [name for name, (flag, _) in clauses.items() if not flag]
        assert ok, f"criterion {number} failed clauses: {failed}"

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
