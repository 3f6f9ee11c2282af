"""Shared fixtures for the fairpool tests."""

import pytest
from fairpool.axioms import CheckBudget
from fairpool.core import canonical_history
from fairpool.models import History


@pytest.fixture
def two_round_history() -> History:
    """P_1 = {s1, s2}, P_2 = {s3}, timed 1..3."""
    return canonical_history([2, 1])


@pytest.fixture
def small_budget() -> CheckBudget:
    """A search budget small enough for quick checker runs."""
    return CheckBudget(n_max=5, max_rounds=3, random_trials=20, seed=0)
