from __future__ import annotations

import pytest

# criterion number -> (status, detail), filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL/SKIP line for an acceptance criterion.

    Usage: ``with criterion(3, "detail") as c: ...; c.detail = "..."``. The
    line is PASS if the block finishes, FAIL if it raises, SKIP on pytest.skip.
    """

    class Recorder:
        def __init__(self, number: int, detail: str = "") -> None:
            self.number = number
            self.detail = detail

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc_type is None:
                status = "PASS"
            elif issubclass(exc_type, pytest.skip.Exception):
                status = "SKIP"
                self.detail = f"{self.detail} {exc}".strip()
            else:
                status = "FAIL"
            ACCEPTANCE[self.number] = (status, self.detail)
            print(f"criterion {self.number}: {status} {self.detail}")
            return False

    return Recorder


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {detail}")
