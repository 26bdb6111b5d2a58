"""Acceptance criteria; each test prints one pass/fail line at the stated tolerance."""

import pytest

from matlag import acceptance


@pytest.mark.parametrize("fn", acceptance.CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(fn, capsys):
    r = fn()
    with capsys.disabled():
        print("\n" + r.line())
    assert r.passed, r.line()


def test_runtime_budgets():
    assert acceptance.criterion_1().seconds < 1.0
    assert acceptance.criterion_8().seconds < 30.0
