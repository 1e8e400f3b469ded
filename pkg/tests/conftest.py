from __future__ import annotations

import time
from contextlib import contextmanager

import pytest

# (code, title, passed, elapsed, limit) per acceptance criterion, in run order
ACCEPTANCE: list[tuple[str, str, bool, float, float]] = []


@pytest.fixture
def criterion():
    @contextmanager
    def run(code: str, title: str, limit: float):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            passed = ok and elapsed < limit
            ACCEPTANCE.append((code, title, passed, elapsed, limit))
            print(f"{code} {'PASS' if passed else 'FAIL'} {title} ({elapsed:.2f} s, limit {limit:g} s)")
        assert elapsed < limit, f"{code} took {elapsed:.2f} s, limit {limit} s"

    return run


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for code, title, passed, elapsed, limit in sorted(ACCEPTANCE):
        terminalreporter.write_line(
            f"{code} {'PASS' if passed else 'FAIL'} {title} ({elapsed:.2f} s, limit {limit:g} s)"
        )
