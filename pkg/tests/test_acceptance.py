"""Primary acceptance criteria, one test each.

Every test prints its pass/fail line; the lines are also gathered into the
pytest terminal summary.  Run this file directly for the bare matrix.
"""

import pytest

from fullgroup import acceptance

LINES: list[str] = []


@pytest.mark.parametrize("suite", acceptance.SUITES, ids=lambda s: s.__name__)
def test_criterion(suite):
    result = suite(seed=0)
    LINES.append(result.line())
    print(result.line())
    assert result.passed, result.line()


if __name__ == "__main__":
    ok = True
    for r in acceptance.run_all(seed=0):
        print(r.line(), flush=True)
        ok &= r.passed
    raise SystemExit(0 if ok else 1)
