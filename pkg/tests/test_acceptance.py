"""The sixteen acceptance criteria; one PASS/FAIL line each in the terminal summary."""

import pytest

from adelic_lab import acceptance

from .conftest import ACCEPTANCE_LINES


@pytest.fixture(scope="module", autouse=True)
def _compiled():
    acceptance.warmup()


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number):
    res = acceptance.CRITERIA[number]()
    ACCEPTANCE_LINES.append(res.line())
    assert res.passed, res.detail
    assert res.in_budget, f"{res.seconds:.1f} s exceeds {res.budget:g} s"
