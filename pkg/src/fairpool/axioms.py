"""Counterexample search for the seven reward sharing axioms.

A checker walks the exhaustive history set followed by seeded random
histories, applies the transformation each axiom quantifies over, and stops
at the first violation. Violations are shrunk and can be replayed through
``replay``, which recomputes everything from the witness alone.

Passing verdicts are labelled ``NO_COUNTEREXAMPLE``: the search is bounded
and makes no universal claim.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .constants import (
    DEFAULT_MAX_ROUNDS,
    DEFAULT_N_MAX,
    DEFAULT_SEED,
    DEFAULT_TOLERANCE,
    DEFAULT_TRIALS,
    SHIFT_FRACTIONS,
)
from .core import extend_round, neighbour_times, restrict, time_shift, validate_history
from .exceptions import CheckError, CounterexampleReplayError, RoundTooLongError
from .generators import instance_stream
from .models import Award, History, Pending, RewardConfig, RoundView, Share
from .schemes import Scheme

logger = logging.getLogger(__name__)

Amount = Union[Fraction, float]


class AxiomId(Enum):
    FIXED_TOTAL_REWARD = "fixed_total_reward"
    ORDINALITY = "ordinality"
    BUDGET_LIMIT = "budget_limit"
    ABSOLUTE_REDISTRIBUTION = "absolute_redistribution"
    RELATIVE_REDISTRIBUTION = "relative_redistribution"
    ROUND_BASED_REWARDS = "round_based_rewards"
    STRICT_POSITIVITY = "strict_positivity"

    @property
    def label(self) -> str:
        return self.value.replace("_", " ").capitalize()

    @classmethod
    def parse(cls, text: str) -> "AxiomId":
        """Accept the value, the member name, or a hyphenated spelling."""
        key = text.strip().lower().replace("-", "_").replace(" ", "_")
        for member in cls:
            if key == member.value:
                return member
        raise ValueError(
            f"Unknown axiom {text!r}; expected one of {', '.join(m.value for m in cls)}"
        )


class VerdictResult(Enum):
    FAIL = "fail"
    NO_COUNTEREXAMPLE = "no_counterexample"


@dataclass(frozen=True)
class CheckBudget:
    """Search limits for one checker run."""

    n_max: int = DEFAULT_N_MAX
    max_rounds: int = DEFAULT_MAX_ROUNDS
    random_trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    tolerance: float = DEFAULT_TOLERANCE
    reward: RewardConfig = field(default_factory=RewardConfig)

    def __post_init__(self) -> None:
        if self.n_max < 2:
            raise ValueError(f"n_max must be at least 2, got {self.n_max}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be at least 1, got {self.max_rounds}")
        if self.random_trials < 0:
            raise ValueError(f"random_trials must be >= 0, got {self.random_trials}")
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")


@dataclass(frozen=True)
class Counterexample:
    """A witness of one violation.

    ``histories[0]`` is the searched history; ``histories[1]``, when present,
    is the transformed one (time-shift, extension or restriction). ``lhs`` and
    ``rhs`` are the two sides of the violated relation.
    """

    axiom: AxiomId
    histories: Tuple[History, ...]
    shares: Tuple[str, ...]
    rounds: Tuple[int, ...]
    lhs: Amount
    rhs: Amount
    relation: str
    description: str

    @property
    def history(self) -> History:
        return self.histories[0]


@dataclass(frozen=True)
class AxiomVerdict:
    """Outcome of checking one axiom for one scheme.

    ``skipped`` counts instances the scheme refused (for example a round
    longer than its epsilon table); ``excluded`` counts comparisons left out
    because a PPLNS award was still pending.
    """

    axiom: AxiomId
    scheme: str
    result: VerdictResult
    instances_checked: int
    counterexample: Optional[Counterexample] = None
    skipped: int = 0
    excluded: int = 0

    @property
    def failed(self) -> bool:
        return self.result is VerdictResult.FAIL

    @property
    def symbol(self) -> str:
        return "-" if self.failed else "+"

    def summary(self) -> str:
        if self.counterexample is not None:
            return (
                f"{self.axiom.value}: FAIL after {self.instances_checked} instances "
                f"({self.counterexample.description})"
            )
        return (
            f"{self.axiom.value}: no counterexample found in "
            f"{self.instances_checked} instances"
        )


@dataclass(frozen=True)
class Comparator:
    """Equality and ordering for awards in the scheme's numeric mode.

    Exact schemes compare rationals directly. Floating schemes use an
    absolute tolerance on values normalized by the net reward.
    """

    exact: bool
    tolerance: float = DEFAULT_TOLERANCE
    scale: float = 1.0

    @classmethod
    def for_scheme(
        cls, scheme: Scheme, reward: RewardConfig, tolerance: float = DEFAULT_TOLERANCE
    ) -> "Comparator":
        return cls(scheme.is_exact, tolerance, float(reward.net) or 1.0)

    @property
    def zero(self) -> Amount:
        return Fraction(0) if self.exact else 0.0

    def _slack(self, normalized: bool) -> float:
        return self.tolerance * (self.scale if normalized else 1.0)

    def equal(self, a: Amount, b: Amount, normalized: bool = True) -> bool:
        if self.exact:
            return a == b
        return abs(float(a) - float(b)) <= self._slack(normalized)

    def greater(self, a: Amount, b: Amount) -> bool:
        if self.exact:
            return a > b
        return float(a) - float(b) > self._slack(True)

    def is_zero(self, a: Amount) -> bool:
        if self.exact:
            return a == 0
        return abs(float(a)) < self._slack(True)

    def positive(self, a: Amount) -> bool:
        if self.exact:
            return a > 0
        return float(a) >= self._slack(True)


def _awards(scheme: Scheme, h: History) -> Dict[str, Award]:
    return {share.id: award for share, award in zip(h.shares, scheme.awards(h))}


def _shift_times(h: History, share: Share) -> Iterator[Fraction]:
    lower, upper = neighbour_times(h, share)
    lower = share.time - 1 if lower is None else lower
    upper = share.time + 1 if upper is None else upper
    for q in SHIFT_FRACTIONS:
        new_time = lower + q * (upper - lower)
        if new_time != share.time:
            yield new_time


def shrink_candidates(h: History) -> Iterator[History]:
    """Histories one shrink step smaller than ``h``.

    Drops the trailing round first, then each non-final share of each round.
    """
    rounds = h.rounds
    if len(rounds) > 1:
        keep = len(h) - rounds[-1].length
        yield validate_history(h.shares[:keep], h.reward)
    for round_view in rounds:
        for share in round_view.shares[:-1]:
            yield validate_history((s for s in h.shares if s.id != share.id), h.reward)


class AxiomChecker:
    """Runs the counterexample search for one scheme under one budget."""

    def __init__(self, scheme: Scheme, budget: Optional[CheckBudget] = None):
        self.scheme = scheme
        self.budget = budget or CheckBudget()
        self.cmp = Comparator.for_scheme(scheme, self.budget.reward, self.budget.tolerance)
        self.logger = logging.getLogger(__name__)
        self._excluded = 0
        self._finders: Dict[AxiomId, Callable[[History], Optional[Counterexample]]] = {
            AxiomId.FIXED_TOTAL_REWARD: self._fixed_total_reward,
            AxiomId.ORDINALITY: self._ordinality,
            AxiomId.BUDGET_LIMIT: self._budget_limit,
            AxiomId.ABSOLUTE_REDISTRIBUTION: self._absolute_redistribution,
            AxiomId.RELATIVE_REDISTRIBUTION: self._relative_redistribution,
            AxiomId.ROUND_BASED_REWARDS: self._round_based_rewards,
            AxiomId.STRICT_POSITIVITY: self._strict_positivity,
        }

    def instances(self) -> Iterator[History]:
        """The exhaustive set followed by the seeded random trials."""
        b = self.budget
        return instance_stream(b.n_max, b.max_rounds, b.seed, b.random_trials, b.reward)

    def find(self, axiom: AxiomId, h: History) -> Optional[Counterexample]:
        """Return the first violation of ``axiom`` on ``h``, or None.

        Raises:
            RoundTooLongError: If a round of ``h``, or of a history derived
                from it, is longer than the scheme supports.
            SchemeError: If the scheme parameters are invalid for ``h``.
        """
        return self._finders[axiom](h)

    def check(
        self, axiom: AxiomId, instances: Optional[Iterable[History]] = None
    ) -> AxiomVerdict:
        """Search ``instances`` (default: the budget's stream) for a violation.

        Instances with a round longer than the scheme supports are skipped.

        Raises:
            SchemeError: If the scheme parameters are invalid for an instance.
            CheckError: If every instance was skipped.
        """
        histories = self.instances() if instances is None else instances
        checked = 0
        skipped = 0
        self._excluded = 0

        for h in histories:
            try:
                found = self.find(axiom, h)
            except RoundTooLongError as e:
                skipped += 1
                self.logger.debug("Skipping %d-share instance: %s", len(h), e)
                continue
            checked += 1
            if found is None:
                continue

            excluded = self._excluded
            witness = self.shrink(found)
            self.logger.info(
                "%s fails %s: %s", self.scheme.spec, axiom.value, witness.description
            )
            return AxiomVerdict(
                axiom, self.scheme.spec, VerdictResult.FAIL, checked, witness, skipped, excluded
            )

        if checked == 0:
            raise CheckError(
                f"{self.scheme.spec} could not be evaluated on any of {skipped} instances "
                f"for {axiom.value}"
            )
        if self._excluded:
            self.logger.warning(
                "%s %s: %d pending comparisons excluded",
                self.scheme.spec,
                axiom.value,
                self._excluded,
            )
        self.logger.info(
            "%s passes %s on %d instances", self.scheme.spec, axiom.value, checked
        )
        return AxiomVerdict(
            axiom,
            self.scheme.spec,
            VerdictResult.NO_COUNTEREXAMPLE,
            checked,
            None,
            skipped,
            self._excluded,
        )

    def shrink(self, cex: Counterexample) -> Counterexample:
        """Apply single-step shrinks while the violation persists."""
        current = cex
        while True:
            for candidate in shrink_candidates(current.history):
                try:
                    smaller = self.find(cex.axiom, candidate)
                except RoundTooLongError:
                    continue
                if smaller is not None:
                    self.logger.debug(
                        "Shrunk witness to round lengths %s", candidate.round_lengths
                    )
                    current = smaller
                    break
            else:
                return current

    # Per-history searches

    def _exclude(self, count: int = 1) -> None:
        self._excluded += count

    def _sum(self, awards: Iterable[Amount]) -> Amount:
        return sum(awards, self.cmp.zero)

    def _fixed_total_reward(self, h: History) -> Optional[Counterexample]:
        awards = _awards(self.scheme, h)
        sums: List[Tuple[int, Amount]] = []
        for round_view in h.rounds:
            members = [awards[s.id] for s in round_view.shares]
            if any(isinstance(a, Pending) for a in members):
                self._exclude()
                continue
            sums.append((round_view.round_index, self._sum(members)))

        if not sums:
            return None
        first_index, first = sums[0]
        for index, total in sums[1:]:
            if not self.cmp.equal(first, total):
                return Counterexample(
                    AxiomId.FIXED_TOTAL_REWARD,
                    (h,),
                    (),
                    (first_index, index),
                    first,
                    total,
                    "!=",
                    f"round {first_index} pays {first} but round {index} pays {total}",
                )
        return None

    def _ordinality(self, h: History) -> Optional[Counterexample]:
        base = _awards(self.scheme, h)
        for share in h.shares:
            for new_time in _shift_times(h, share):
                shifted = time_shift(h, share, new_time)
                moved = _awards(self.scheme, shifted)
                for other in h.shares:
                    if other.id == share.id:
                        continue
                    before, after = base[other.id], moved[other.id]
                    if isinstance(before, Pending) or isinstance(after, Pending):
                        self._exclude()
                        continue
                    if not self.cmp.equal(before, after):
                        return Counterexample(
                            AxiomId.ORDINALITY,
                            (h, shifted),
                            (share.id, other.id),
                            (),
                            before,
                            after,
                            "!=",
                            f"moving {share.id} from {share.time} to {new_time} "
                            f"changes {other.id} from {before} to {after}",
                        )
        return None

    def _budget_limit(self, h: History) -> Optional[Counterexample]:
        awards = _awards(self.scheme, h)
        block_reward = h.reward.block_reward
        for round_view in h.rounds:
            confirmed = []
            for s in round_view.shares:
                award = awards[s.id]
                if isinstance(award, Pending):
                    self._exclude()
                    continue
                confirmed.append(award)
            total = self._sum(confirmed)
            if self.cmp.greater(total, block_reward):
                return Counterexample(
                    AxiomId.BUDGET_LIMIT,
                    (h,),
                    (),
                    (round_view.round_index,),
                    total,
                    block_reward,
                    ">",
                    f"round {round_view.round_index} pays {total} above B={block_reward}",
                )
        return None

    def _extensions(
        self, h: History
    ) -> Iterator[Tuple[RoundView, Dict[str, Award], History, Dict[str, Award]]]:
        base = _awards(self.scheme, h)
        for round_view in h.rounds:
            if round_view.length < 2:
                continue
            extended = extend_round(h, round_view.round_index)
            yield round_view, base, extended, _awards(self.scheme, extended)

    def _absolute_redistribution(self, h: History) -> Optional[Counterexample]:
        for round_view, base, extended, after in self._extensions(h):
            diffs: List[Tuple[str, Amount]] = []
            for s in round_view.shares:
                before_award, after_award = base[s.id], after[s.id]
                if isinstance(before_award, Pending) or isinstance(after_award, Pending):
                    self._exclude()
                    continue
                diffs.append((s.id, before_award - after_award))
            if not diffs:
                continue
            first_id, first = diffs[0]
            for share_id, diff in diffs[1:]:
                if not self.cmp.equal(first, diff):
                    return Counterexample(
                        AxiomId.ABSOLUTE_REDISTRIBUTION,
                        (h, extended),
                        (first_id, share_id),
                        (round_view.round_index,),
                        first,
                        diff,
                        "!=",
                        f"extending round {round_view.round_index} lowers {first_id} "
                        f"by {first} but {share_id} by {diff}",
                    )
        return None

    def _relative_redistribution(self, h: History) -> Optional[Counterexample]:
        for round_view, base, extended, after in self._extensions(h):
            ratios: List[Tuple[str, Amount]] = []
            for s in round_view.shares:
                before_award, after_award = base[s.id], after[s.id]
                if isinstance(before_award, Pending) or isinstance(after_award, Pending):
                    self._exclude()
                    continue
                if self.cmp.is_zero(before_award):
                    continue
                ratios.append((s.id, after_award / before_award))
            if not ratios:
                continue
            first_id, first = ratios[0]
            for share_id, ratio in ratios[1:]:
                if not self.cmp.equal(first, ratio, normalized=False):
                    return Counterexample(
                        AxiomId.RELATIVE_REDISTRIBUTION,
                        (h, extended),
                        (first_id, share_id),
                        (round_view.round_index,),
                        first,
                        ratio,
                        "!=",
                        f"extending round {round_view.round_index} scales {first_id} "
                        f"by {first} but {share_id} by {ratio}",
                    )
        return None

    def _round_based_rewards(self, h: History) -> Optional[Counterexample]:
        if h.num_rounds == 1:
            return None
        awards = _awards(self.scheme, h)
        for round_view in h.rounds:
            restricted = restrict(h, round_view.round_index)
            alone = _awards(self.scheme, restricted)
            for s in round_view.shares:
                in_history = awards[s.id]
                if isinstance(in_history, Pending):
                    self._exclude()
                    continue
                in_round = _accrued(alone[s.id])
                if not self.cmp.equal(in_history, in_round):
                    return Counterexample(
                        AxiomId.ROUND_BASED_REWARDS,
                        (h, restricted),
                        (s.id,),
                        (round_view.round_index,),
                        in_history,
                        in_round,
                        "!=",
                        f"{s.id} earns {in_history} in the history but {in_round} "
                        f"in round {round_view.round_index} alone",
                    )
        return None

    def _strict_positivity(self, h: History) -> Optional[Counterexample]:
        for share, award in zip(h.shares, self.scheme.awards(h)):
            if isinstance(award, Pending):
                self._exclude()
                continue
            if not self.cmp.positive(award):
                return Counterexample(
                    AxiomId.STRICT_POSITIVITY,
                    (h,),
                    (share.id,),
                    (h.locate(share).round_index,),
                    award,
                    self.cmp.zero,
                    "<=",
                    f"{share.id} earns {award}",
                )
        return None


def _accrued(award: Award) -> Amount:
    return award.accrued if isinstance(award, Pending) else award


def _confirmed(scheme: Scheme, share_id: str, h: History) -> Amount:
    award = scheme(h.share(share_id), h)
    if isinstance(award, Pending):
        raise CounterexampleReplayError(f"Award of {share_id} is pending on replay")
    return award


def replay(
    scheme: Scheme, cex: Counterexample, tolerance: float = DEFAULT_TOLERANCE
) -> Tuple[Amount, Amount]:
    """Re-derive a counterexample from its witness alone.

    Rebuilds the transformed history from the base history, evaluates the
    scheme share by share, and checks that the relation is still violated
    with the recorded values.

    Returns:
        The recomputed (lhs, rhs).

    Raises:
        CounterexampleReplayError: If the witness does not reproduce.
    """
    h = cex.history
    cmp = Comparator.for_scheme(scheme, h.reward, tolerance)
    axiom = cex.axiom

    def rebuilt(expected: History) -> History:
        if len(cex.histories) < 2 or cex.histories[1] != expected:
            raise CounterexampleReplayError(
                f"Transformed history of the {axiom.value} witness does not rebuild"
            )
        return expected

    if axiom is AxiomId.FIXED_TOTAL_REWARD:
        first, second = cex.rounds
        lhs = sum((_confirmed(scheme, s.id, h) for s in h.round(first).shares), cmp.zero)
        rhs = sum((_confirmed(scheme, s.id, h) for s in h.round(second).shares), cmp.zero)
        violated = not cmp.equal(lhs, rhs)
    elif axiom is AxiomId.ORDINALITY:
        moved, other = cex.shares
        shifted = rebuilt(time_shift(h, moved, cex.histories[1].share(moved).time))
        lhs = _confirmed(scheme, other, h)
        rhs = _confirmed(scheme, other, shifted)
        violated = not cmp.equal(lhs, rhs)
    elif axiom is AxiomId.BUDGET_LIMIT:
        (r,) = cex.rounds
        awards = [scheme(s, h) for s in h.round(r).shares]
        lhs = sum((a for a in awards if not isinstance(a, Pending)), cmp.zero)
        rhs = h.reward.block_reward
        violated = cmp.greater(lhs, rhs)
    elif axiom in (AxiomId.ABSOLUTE_REDISTRIBUTION, AxiomId.RELATIVE_REDISTRIBUTION):
        (r,) = cex.rounds
        extended = rebuilt(extend_round(h, r))
        sides = []
        for share_id in cex.shares:
            before = _confirmed(scheme, share_id, h)
            after = _confirmed(scheme, share_id, extended)
            if axiom is AxiomId.ABSOLUTE_REDISTRIBUTION:
                sides.append(before - after)
            else:
                sides.append(after / before)
        lhs, rhs = sides
        violated = not cmp.equal(
            lhs, rhs, normalized=axiom is AxiomId.ABSOLUTE_REDISTRIBUTION
        )
    elif axiom is AxiomId.ROUND_BASED_REWARDS:
        (r,) = cex.rounds
        (share_id,) = cex.shares
        restricted = rebuilt(restrict(h, r))
        lhs = _confirmed(scheme, share_id, h)
        rhs = _accrued(scheme(restricted.share(share_id), restricted))
        violated = not cmp.equal(lhs, rhs)
    else:
        (share_id,) = cex.shares
        lhs = _confirmed(scheme, share_id, h)
        rhs = cmp.zero
        violated = not cmp.positive(lhs)

    normalized = axiom is not AxiomId.RELATIVE_REDISTRIBUTION
    if not violated:
        raise CounterexampleReplayError(
            f"{axiom.value} witness no longer violates: {lhs} {cex.relation} {rhs} is false"
        )
    if not (cmp.equal(lhs, cex.lhs, normalized) and cmp.equal(rhs, cex.rhs, normalized)):
        raise CounterexampleReplayError(
            f"{axiom.value} witness values moved: recorded ({cex.lhs}, {cex.rhs}), "
            f"replayed ({lhs}, {rhs})"
        )
    logger.debug(
        "Replayed %s witness on %s: %s %s %s", axiom.value, scheme.spec, lhs, cex.relation, rhs
    )
    return lhs, rhs


# Module-level entry points


def check_axiom(
    scheme: Scheme, axiom: AxiomId, budget: Optional[CheckBudget] = None
) -> AxiomVerdict:
    return AxiomChecker(scheme, budget).check(axiom)


def check_fixed_total_reward(
    scheme: Scheme, budget: Optional[CheckBudget] = None
) -> AxiomVerdict:
    """Look for two rounds of one history with unequal award sums."""
    return check_axiom(scheme, AxiomId.FIXED_TOTAL_REWARD, budget)


def check_ordinality(scheme: Scheme, budget: Optional[CheckBudget] = None) -> AxiomVerdict:
    """Look for a time-shift that changes another share's award."""
    return check_axiom(scheme, AxiomId.ORDINALITY, budget)


def check_budget_limit(scheme: Scheme, budget: Optional[CheckBudget] = None) -> AxiomVerdict:
    """Look for a round whose award sum exceeds the block reward."""
    return check_axiom(scheme, AxiomId.BUDGET_LIMIT, budget)


def check_absolute_redistribution(
    scheme: Scheme, budget: Optional[CheckBudget] = None
) -> AxiomVerdict:
    """Look for an extension that lowers two shares of a round by different amounts."""
    return check_axiom(scheme, AxiomId.ABSOLUTE_REDISTRIBUTION, budget)


def check_relative_redistribution(
    scheme: Scheme, budget: Optional[CheckBudget] = None
) -> AxiomVerdict:
    """Look for an extension that scales two shares of a round by different ratios."""
    return check_axiom(scheme, AxiomId.RELATIVE_REDISTRIBUTION, budget)


def check_round_based_rewards(
    scheme: Scheme, budget: Optional[CheckBudget] = None
) -> AxiomVerdict:
    """Look for a share whose award changes when its round is taken alone."""
    return check_axiom(scheme, AxiomId.ROUND_BASED_REWARDS, budget)


def check_strict_positivity(
    scheme: Scheme, budget: Optional[CheckBudget] = None
) -> AxiomVerdict:
    """Look for a share with a zero award."""
    return check_axiom(scheme, AxiomId.STRICT_POSITIVITY, budget)


def check_all(
    scheme: Scheme,
    budget: Optional[CheckBudget] = None,
    axioms: Optional[Sequence[AxiomId]] = None,
) -> Dict[AxiomId, AxiomVerdict]:
    """Run several checkers over one shared instance stream.

    Args:
        scheme: Scheme under test.
        budget: Search limits; defaults to ``CheckBudget()``.
        axioms: Axioms to check, in order; defaults to all seven.
    """
    checker = AxiomChecker(scheme, budget)
    instances = list(checker.instances())
    return {axiom: checker.check(axiom, instances) for axiom in (axioms or list(AxiomId))}
