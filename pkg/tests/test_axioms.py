"""Tests for the axiom checkers, shrinking and witness replay."""

from dataclasses import replace
from fractions import Fraction

import pytest

from fairpool.axioms import (
    AxiomChecker,
    AxiomId,
    CheckBudget,
    Comparator,
    VerdictResult,
    check_all,
    check_budget_limit,
    check_fixed_total_reward,
    check_ordinality,
    check_strict_positivity,
    replay,
    shrink_candidates,
)
from fairpool.core import canonical_history
from fairpool.exceptions import (
    CheckError,
    CounterexampleReplayError,
    InvalidDeltaError,
    RoundTooLongError,
)
from fairpool.models import History
from fairpool.schemes import (
    EpsilonTable,
    Scheme,
    absolute_fair,
    geometric,
    ic_scheme,
    independence_scheme,
    k_pseudo_proportional,
    pplns,
    pps,
    proportional,
    slush,
)


class TestAxiomId:
    """Test cases for axiom identifiers."""

    def test_parse(self) -> None:
        """Values parse with hyphens or spaces."""
        assert AxiomId.parse("budget-limit") is AxiomId.BUDGET_LIMIT
        assert AxiomId.parse("Strict positivity") is AxiomId.STRICT_POSITIVITY
        with pytest.raises(ValueError):
            AxiomId.parse("fairness")

    def test_label(self) -> None:
        assert AxiomId.ROUND_BASED_REWARDS.label == "Round based rewards"


class TestCheckBudget:
    """Test cases for search budgets."""

    def test_defaults(self) -> None:
        """Six shares, three rounds, 500 random trials, seed 0."""
        budget = CheckBudget()
        assert (budget.n_max, budget.max_rounds, budget.random_trials, budget.seed) == (
            6,
            3,
            500,
            0,
        )

    def test_validation(self) -> None:
        """n_max below 2 and negative trials are rejected."""
        with pytest.raises(ValueError):
            CheckBudget(n_max=1)
        with pytest.raises(ValueError):
            CheckBudget(random_trials=-1)
        with pytest.raises(ValueError):
            CheckBudget(tolerance=0)


class TestComparator:
    """Test cases for award comparison."""

    def test_exact(self) -> None:
        """Exact mode compares rationals with no slack."""
        cmp = Comparator(exact=True)
        assert cmp.equal(Fraction(1, 3), Fraction(1, 3))
        assert not cmp.equal(Fraction(1, 3), Fraction(1, 3) + Fraction(1, 10**12))
        assert cmp.zero == 0

    def test_float_tolerance_scales_with_r(self) -> None:
        """Differences are normalized by R unless comparing ratios."""
        cmp = Comparator(exact=False, tolerance=1e-6, scale=10.0)
        assert cmp.equal(1.0, 1.000005)
        assert not cmp.equal(1.0, 1.000005, normalized=False)
        assert cmp.greater(1.0001, 1.0)
        assert not cmp.greater(1.000001, 1.0)
        assert cmp.is_zero(1e-7)
        assert not cmp.positive(1e-7)


class TestShrink:
    """Test cases for the shrink steps."""

    def test_candidates(self, two_round_history: History) -> None:
        """Drop the trailing round first, then each non-final share."""
        candidates = [h.round_lengths for h in shrink_candidates(two_round_history)]
        assert candidates == [(2,), (1, 1)]

    def test_single_share_has_no_candidates(self) -> None:
        assert list(shrink_candidates(canonical_history([1]))) == []


class TestCheckers:
    """Test cases for the counterexample search."""

    def test_proportional_passes_everything(self, small_budget: CheckBudget) -> None:
        """Proportional has no counterexample to any of the seven axioms."""
        verdicts = check_all(proportional(), small_budget)
        assert list(verdicts) == list(AxiomId)
        for verdict in verdicts.values():
            assert verdict.result is VerdictResult.NO_COUNTEREXAMPLE
            assert verdict.counterexample is None
            assert verdict.symbol == "+"
            assert verdict.instances_checked > 0

    def test_pps_fixed_total_reward(self, small_budget: CheckBudget) -> None:
        """PPS pays by round length; the minimal witness is rounds (1, 2)."""
        verdict = check_fixed_total_reward(pps(Fraction(1, 3)), small_budget)
        assert verdict.failed
        cex = verdict.counterexample
        assert cex is not None
        assert cex.history.round_lengths == (1, 2)
        assert cex.rounds == (1, 2)
        assert (cex.lhs, cex.rhs) == (Fraction(1, 3), Fraction(2, 3))
        assert replay(pps(Fraction(1, 3)), cex) == (Fraction(1, 3), Fraction(2, 3))

    def test_pplns_budget_limit(self, small_budget: CheckBudget) -> None:
        """PPLNS(3) overpays some round; the witness replays."""
        scheme = pplns(3)
        verdict = check_budget_limit(scheme, small_budget)
        assert verdict.failed
        cex = verdict.counterexample
        assert cex is not None
        assert cex.lhs > cex.history.reward.block_reward
        replay(scheme, cex)

    def test_pplns_ordinality_excludes_pending(self, small_budget: CheckBudget) -> None:
        """Pending comparisons are counted, not judged."""
        verdict = check_ordinality(pplns(3), small_budget)
        assert verdict.result is VerdictResult.NO_COUNTEREXAMPLE
        assert verdict.excluded > 0

    def test_k_pseudo_positivity(self, small_budget: CheckBudget) -> None:
        """With 0 < delta < R the witness is one round of k+1 shares."""
        scheme = k_pseudo_proportional(2, Fraction(1, 3))
        verdict = check_strict_positivity(scheme, small_budget)
        cex = verdict.counterexample
        assert cex is not None
        assert cex.history.round_lengths == (3,)
        assert cex.shares == ("s3",)
        assert cex.lhs == 0
        replay(scheme, cex)

    def test_skipped_instances(self, small_budget: CheckBudget) -> None:
        """Rounds longer than the epsilon table are skipped."""
        verdict = check_fixed_total_reward(
            absolute_fair(EpsilonTable.harmonic(3)), small_budget
        )
        assert verdict.result is VerdictResult.NO_COUNTEREXAMPLE
        assert verdict.skipped > 0

    def test_slush_ordinality(self, small_budget: CheckBudget) -> None:
        """Slush scores depend on time; the float witness replays in tolerance."""
        scheme = slush()
        verdict = check_ordinality(scheme, small_budget)
        cex = verdict.counterexample
        assert cex is not None
        assert len(cex.histories) == 2
        replay(scheme, cex, small_budget.tolerance)

    def test_invalid_parameters_are_not_skips(self, small_budget: CheckBudget) -> None:
        """A delta above R is an error, not a pass on zero instances."""
        scheme = k_pseudo_proportional(3, Fraction(2))
        with pytest.raises(InvalidDeltaError):
            check_fixed_total_reward(scheme, small_budget)

    def test_all_instances_skipped(self, small_budget: CheckBudget) -> None:
        """A verdict needs at least one evaluated instance."""
        checker = AxiomChecker(absolute_fair(EpsilonTable.harmonic(2)), small_budget)
        with pytest.raises(CheckError):
            checker.check(AxiomId.BUDGET_LIMIT, [canonical_history([3]), canonical_history([4])])

    def test_deterministic(self, small_budget: CheckBudget) -> None:
        """Equal inputs give equal verdicts."""
        first = AxiomChecker(pplns(3), small_budget).check(AxiomId.STRICT_POSITIVITY)
        second = AxiomChecker(pplns(3), small_budget).check(AxiomId.STRICT_POSITIVITY)
        assert first == second

    def test_subset_order(self, small_budget: CheckBudget) -> None:
        """check_all keeps the requested axiom order."""
        axioms = [AxiomId.ORDINALITY, AxiomId.BUDGET_LIMIT]
        assert list(check_all(proportional(), small_budget, axioms)) == axioms


class TestShrinkMinimality:
    """Emitted witnesses admit no failing single-step shrink."""

    @pytest.mark.parametrize(
        "scheme, axiom",
        [
            (pps(Fraction(1, 3)), AxiomId.FIXED_TOTAL_REWARD),
            (pplns(3), AxiomId.BUDGET_LIMIT),
            (pplns(3), AxiomId.ROUND_BASED_REWARDS),
            (geometric(Fraction(2)), AxiomId.FIXED_TOTAL_REWARD),
            (geometric(Fraction(2)), AxiomId.ABSOLUTE_REDISTRIBUTION),
            (ic_scheme(3), AxiomId.RELATIVE_REDISTRIBUTION),
            (k_pseudo_proportional(2, Fraction(1, 3)), AxiomId.STRICT_POSITIVITY),
            (independence_scheme(4), AxiomId.ROUND_BASED_REWARDS),
            (slush(), AxiomId.ORDINALITY),
        ],
    )
    def test_witness_is_minimal(
        self, scheme: Scheme, axiom: AxiomId, small_budget: CheckBudget
    ) -> None:
        checker = AxiomChecker(scheme, small_budget)
        verdict = checker.check(axiom)
        cex = verdict.counterexample
        assert cex is not None
        for candidate in shrink_candidates(cex.history):
            try:
                assert checker.find(axiom, candidate) is None
            except RoundTooLongError:
                continue


class TestReplay:
    """Test cases for independent witness replay."""

    def test_wrong_scheme(self, small_budget: CheckBudget) -> None:
        """A PPS witness does not reproduce under proportional."""
        cex = check_fixed_total_reward(pps(Fraction(1, 3)), small_budget).counterexample
        assert cex is not None
        with pytest.raises(CounterexampleReplayError):
            replay(proportional(), cex)

    def test_tampered_values(self, small_budget: CheckBudget) -> None:
        """Recorded values must match the recomputation."""
        cex = check_fixed_total_reward(pps(Fraction(1, 3)), small_budget).counterexample
        assert cex is not None
        with pytest.raises(CounterexampleReplayError):
            replay(pps(Fraction(1, 3)), replace(cex, rhs=Fraction(1)))
