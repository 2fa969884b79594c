"""Acceptance criteria at their stated tolerances; one summary line per criterion."""

import pytest

from bures_geo import acceptance


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, acceptance_log):
    result = acceptance.run_criterion(number)
    acceptance_log.append(result.line())
    print(result.line())
    assert result.passed, result.detail
