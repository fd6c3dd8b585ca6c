
import pytest

_ACCEPTANCE = {}


def record(number: int, name: str, passed: bool, detail: str = ""):
    line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
    _ACCEPTANCE[number] = line
    print(line)
    return passed


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])


