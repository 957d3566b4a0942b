import pytest

from hearo.dataset import load_cleveland

_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def cleveland():
    return load_cleveland()


@pytest.fixture
def criterion():
    """Record a pass/fail line for the acceptance summary."""

    def record(name: str, passed: bool, detail: str = "") -> None:
        _CRITERIA[name] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s.split()[0].rstrip("."))):
        passed, detail = _CRITERIA[name]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}  {detail}")
