"""The acceptance matrix: every criterion at its stated tolerance and time limit.

One PASS/FAIL line per criterion is printed in the terminal summary.
"""
import pytest

from conftest import ACCEPTANCE_LINES
from descentkit.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    r = run_criterion(number, seed=0)
    print(r.line())
    ACCEPTANCE_LINES.append(r.line())
    assert r.elapsed < r.limit, r.line()
    assert r.passed, r.detail
