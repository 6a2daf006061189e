"""Acceptance criteria 1-14 at full scale.

Each test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary (see conftest.py).  Run directly for the lines alone:
``python3 tests/test_acceptance.py``.
"""
import json

import pytest

from cannon.acceptance import CRITERIA

LINES = []


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    r = CRITERIA[k](seed=0, scale=1.0)
    line = f"{r.line()} {json.dumps(r.detail, sort_keys=True, default=str)}"
    LINES.append(r.line())
    print(line)
    assert r.passed, line


if __name__ == "__main__":
    from cannon.acceptance import run_all
    res = run_all()
    raise SystemExit(0 if all(r.passed for r in res) else 1)
