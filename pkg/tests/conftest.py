"""Shared fixtures: the acceptance verdict recorder and its summary block."""

import pytest

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record one ``PASS``/``FAIL`` line per acceptance criterion and return the outcome."""

    def record(number: int, title: str, passed: bool, detail: str, seconds: float) -> bool:
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {title} [{detail}; {seconds:.1f}s]"
        _VERDICTS.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
