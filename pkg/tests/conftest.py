import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

SUITE_LIMIT = 600.0
_START = time.perf_counter()
ACCEPTANCE = {}


@pytest.fixture
def record_criterion():
    def record(number, title, passed, detail=""):
        ACCEPTANCE[number] = (title, bool(passed), detail)
        line = f"criterion {number:>2} {title}: {'PASS' if passed else 'FAIL'}"
        if detail:
            line += f" ({detail})"
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    elapsed = time.perf_counter() - _START
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[k]
        if k == 11:
            ok = ok and elapsed < SUITE_LIMIT
            detail = f"{detail}; suite wall time {elapsed:.0f}s, limit {SUITE_LIMIT:.0f}s"
        tr.write_line(f"criterion {k:>2} {title}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))
