"""Acceptance criteria 1 to 10 at their stated tolerances.

Each test prints one ``[PASS]`` or ``[FAIL]`` line with the measured worst
case, then asserts it.
"""

import pytest

from zollfinsler import checks

CRITERIA = [
    ("gauss", "1 gauss curvature positivity"),
    ("implicit", "2 parametric-implicit identity"),
    ("integral", "3 integral identity"),
    ("radical", "4 radical formula correctness"),
    ("signs", "5 sign structure"),
    ("axioms", "6 finsler axioms"),
    ("curvature", "7 constant flag curvature"),
    ("zoll", "8 zoll property"),
    ("round", "9 round-sphere limit"),
    ("quartic", "10 quartic solver oracle"),
]


@pytest.mark.slow
@pytest.mark.parametrize("name", [c[0] for c in CRITERIA], ids=[c[1] for c in CRITERIA])
def test_criterion(name, capsys):
    (result,) = checks.run_suite(only=[name])
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
