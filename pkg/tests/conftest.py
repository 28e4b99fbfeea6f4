import os

import pytest

os.environ.setdefault("SIEGEL_LAB_THREADS", "2")

# one line per acceptance criterion, printed at the end of the run
CRITERIA: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def criterion():
    def record(k: int, name: str, ok: bool, detail: str = "") -> bool:
        CRITERIA.setdefault(k, []).append((name, bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        parts = CRITERIA[k]
        ok = all(p[1] for p in parts)
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}")
        for name, good, detail in parts:
            terminalreporter.write_line(f"    {'ok  ' if good else 'FAIL'} {name} {detail}")
