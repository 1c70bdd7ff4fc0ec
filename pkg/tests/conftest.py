import time

import pytest

_START = time.perf_counter()
CRITERIA: list[str] = []


def session_elapsed() -> float:
    return time.perf_counter() - _START


def pytest_collection_modifyitems(items):
    # run the acceptance criteria last so the wall-time criterion sees the whole suite
    items.sort(key=lambda it: it.nodeid.startswith("tests/test_acceptance.py") or "test_acceptance.py" in it.nodeid)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(capsys):
    """Record one pass/fail line per acceptance criterion and print it immediately."""

    def record(tag: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} {tag}: {detail}"
        CRITERIA.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return record
