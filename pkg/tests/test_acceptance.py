"""Acceptance gate: every criterion at its stated tolerance, one pass/fail line each.

The lines are printed in a terminal-summary section after the run, and as each
criterion finishes when pytest runs with ``-s``.
"""

import pytest

from halfline_kdv.verification import CRITERIA, run_criterion

_RESULTS = {}


@pytest.mark.parametrize("name", list(CRITERIA))
def test_criterion(name):
    r = run_criterion(name)
    _RESULTS[name] = r
    print(r.line())
    assert r.passed, r.line()
