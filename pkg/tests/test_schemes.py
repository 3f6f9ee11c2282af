"""Tests for the reward sharing schemes and the scheme spec grammar."""

import json
import math
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairpool.constants import SLUSH_INTERNAL_TOLERANCE
from fairpool.core import canonical_history, validate_history
from fairpool.exceptions import (
    InvalidDeltaError,
    InvalidEpsilonError,
    InvalidParamsError,
    InvalidRatioError,
    RoundTooLongError,
    SchemeError,
    SchemeSpecError,
    UnknownSchemeIdError,
)
from fairpool.models import History, NumericMode, Pending, RewardConfig, Share
from fairpool.schemes import (
    EpsilonTable,
    absolute_fair,
    compute_payout_report,
    constrained_geometric,
    geometric,
    ic_scheme,
    independence_scheme,
    k_pseudo_proportional,
    parse_scheme_spec,
    pplns,
    pps,
    proportional,
    relative_fair,
    slush,
    slush_scores,
    table_schemes,
)

round_lengths = st.lists(st.integers(min_value=1, max_value=6), min_size=1, max_size=3)


def _round_sums(awards: tuple, h: History) -> list:
    sums = []
    position = 0
    for length in h.round_lengths:
        sums.append(sum(awards[position : position + length]))
        position += length
    return sums


class TestProportional:
    """Test cases for the proportional scheme."""

    def test_awards(self, two_round_history: History) -> None:
        """Each share gets R over its round length."""
        assert proportional().awards(two_round_history) == (
            Fraction(1, 2),
            Fraction(1, 2),
            Fraction(1),
        )

    def test_uses_net_reward(self) -> None:
        """The fee comes out before distribution."""
        h = canonical_history([2], RewardConfig(Fraction(2), Fraction(1, 2)))
        assert proportional().awards(h) == (Fraction(3, 4), Fraction(3, 4))

    @given(round_lengths)
    def test_every_round_pays_r(self, lengths: list) -> None:
        """Round sums equal R for any history."""
        h = canonical_history(lengths)
        assert _round_sums(proportional().awards(h), h) == [1] * len(lengths)


class TestEpsilonTable:
    """Test cases for epsilon tables."""

    def test_validation(self) -> None:
        """eps(1) is 1 and every value lies in [0, 1]."""
        with pytest.raises(InvalidEpsilonError):
            EpsilonTable((Fraction(1, 2),))
        with pytest.raises(InvalidEpsilonError):
            EpsilonTable((Fraction(1), Fraction(3, 2)))
        with pytest.raises(InvalidEpsilonError):
            EpsilonTable(())

    def test_round_too_long(self) -> None:
        """Lookups past N_max fail with RoundTooLongError."""
        eps = EpsilonTable.harmonic(3)
        assert eps(3) == Fraction(1, 3)
        with pytest.raises(RoundTooLongError):
            eps(4)

    def test_harmonic_tail(self) -> None:
        """For 1/j the tail to n telescopes to 1/j - 1/n."""
        eps = EpsilonTable.harmonic(8)
        for n in range(1, 9):
            for j in range(1, n + 1):
                assert eps.tail(j, n) == Fraction(1, j) - Fraction(1, n)
        assert eps.is_absolute_fair()

    def test_absolute_violation(self) -> None:
        """A flat table breaks the absolute-fair constraint at rank 1."""
        eps = EpsilonTable((Fraction(1), Fraction(1), Fraction(1)))
        assert eps.absolute_violations() == [1]
        with pytest.raises(InvalidEpsilonError):
            absolute_fair(eps)

    def test_from_json(self, tmp_path: Path) -> None:
        """Tables load from a JSON array of rational strings."""
        path = tmp_path / "eps.json"
        path.write_text(json.dumps(["1", "1/2", "1/3"]))
        assert EpsilonTable.from_json(path) == EpsilonTable.harmonic(3)

        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"eps": [1]}))
        with pytest.raises(InvalidEpsilonError):
            EpsilonTable.from_json(bad)
        with pytest.raises(InvalidEpsilonError):
            EpsilonTable.from_json(tmp_path / "missing.json")


class TestEpsilonFamilies:
    """Test cases for the absolute and relative fair families."""

    @given(st.lists(st.integers(min_value=1, max_value=8), min_size=1, max_size=3))
    def test_harmonic_reduces_to_proportional(self, lengths: list) -> None:
        """With eps(j) = 1/j both families pay R/|P| per share."""
        h = canonical_history(lengths)
        eps = EpsilonTable.harmonic(8)
        expected = proportional().awards(h)
        assert absolute_fair(eps).awards(h) == expected
        assert relative_fair(eps).awards(h) == expected

    def test_relative_fair_values(self) -> None:
        """eps = [1, 1/2, 1/4, 1/4] on a round of three shares."""
        eps = EpsilonTable((Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))
        h = canonical_history([3])
        assert relative_fair(eps).awards(h) == (
            Fraction(3, 8),
            Fraction(3, 8),
            Fraction(1, 4),
        )

    def test_round_longer_than_table(self) -> None:
        """Both families refuse rounds longer than N_max."""
        h = canonical_history([4])
        eps = EpsilonTable.harmonic(3)
        with pytest.raises(RoundTooLongError):
            absolute_fair(eps).awards(h)
        with pytest.raises(RoundTooLongError):
            relative_fair(eps).awards(h)


class TestKPseudoProportional:
    """Test cases for k-pseudo proportional schemes."""

    def test_below_threshold(self) -> None:
        """Rounds shorter than k are paid proportionally."""
        h = canonical_history([2])
        assert k_pseudo_proportional(3, Fraction(1, 5)).awards(h) == (
            Fraction(1, 2),
            Fraction(1, 2),
        )

    def test_at_and_above_threshold(self) -> None:
        """(R - delta)/(k-1) before k, delta at k, nothing after."""
        h = canonical_history([4])
        assert k_pseudo_proportional(3, Fraction(1, 5)).awards(h) == (
            Fraction(2, 5),
            Fraction(2, 5),
            Fraction(1, 5),
            Fraction(0),
        )

    def test_infinite_k(self) -> None:
        """k = infinity is plain proportional."""
        h = canonical_history([5])
        assert k_pseudo_proportional(None, Fraction(0)).awards(h) == proportional().awards(h)

    def test_parameter_validation(self) -> None:
        """k below 2 and delta outside [0, R] are rejected."""
        with pytest.raises(InvalidParamsError):
            k_pseudo_proportional(1, Fraction(0))
        with pytest.raises(InvalidDeltaError):
            k_pseudo_proportional(2, Fraction(-1))
        with pytest.raises(InvalidDeltaError):
            k_pseudo_proportional(2, Fraction(2)).awards(canonical_history([2]))


class TestPPS:
    """Test cases for pay per share."""

    def test_constant(self, two_round_history: History) -> None:
        """Every share receives c."""
        assert pps(Fraction(1, 3)).awards(two_round_history) == (Fraction(1, 3),) * 3

    def test_positive_constant(self) -> None:
        """c must be positive."""
        with pytest.raises(InvalidParamsError):
            pps(Fraction(0))


class TestPPLNS:
    """Test cases for pay per last N shares."""

    def test_window(self, two_round_history: History) -> None:
        """Each full solution in the next N shares pays R/N."""
        assert pplns(2).awards(two_round_history) == (
            Fraction(1, 2),
            Fraction(1),
            Pending(Fraction(1, 2)),
        )

    def test_pending_tail(self) -> None:
        """The last N-1 shares are pending with their accrued amount."""
        h = canonical_history([5, 1, 1, 1, 12])
        awards = pplns(3).awards(h)
        assert all(not isinstance(a, Pending) for a in awards[:-2])
        assert all(isinstance(a, Pending) for a in awards[-2:])
        assert awards[-1] == Pending(Fraction(1, 3))
        assert awards[-2] == Pending(Fraction(1, 3))

    def test_window_size(self) -> None:
        """N is at least 1."""
        with pytest.raises(InvalidParamsError):
            pplns(0)


class TestGeometric:
    """Test cases for the geometric and constrained geometric schemes."""

    def test_geometric_values(self) -> None:
        """(r-1)/r^(|P|-rho+1) * B."""
        h = canonical_history([3])
        assert geometric(Fraction(2)).awards(h) == (
            Fraction(1, 8),
            Fraction(1, 4),
            Fraction(1, 2),
        )

    def test_constrained_values(self) -> None:
        """The constrained form rescales so the round pays B."""
        h = canonical_history([3])
        assert constrained_geometric(Fraction(2)).awards(h) == (
            Fraction(1, 7),
            Fraction(2, 7),
            Fraction(4, 7),
        )

    @given(round_lengths, st.integers(min_value=2, max_value=5))
    def test_constrained_pays_block_reward(self, lengths: list, r: int) -> None:
        """Every round of the constrained form sums to B."""
        h = canonical_history(lengths)
        awards = constrained_geometric(Fraction(r)).awards(h)
        assert _round_sums(awards, h) == [1] * len(lengths)

    def test_ratio(self) -> None:
        """r must exceed 1."""
        with pytest.raises(InvalidRatioError):
            geometric(Fraction(1))
        with pytest.raises(InvalidRatioError):
            constrained_geometric(Fraction(1, 2))


class TestIC:
    """Test cases for the incentive compatible scheme."""

    def test_short_round(self) -> None:
        """Short rounds pay R/D and the residual to the full solution."""
        assert ic_scheme(3).awards(canonical_history([2])) == (
            Fraction(1, 3),
            Fraction(2, 3),
        )

    def test_long_round(self) -> None:
        """Rounds of at least D shares are proportional."""
        assert ic_scheme(3).awards(canonical_history([4])) == (Fraction(1, 4),) * 4

    def test_d(self) -> None:
        """D is at least 1."""
        with pytest.raises(InvalidParamsError):
            ic_scheme(0)


class TestSlush:
    """Test cases for the score-based Slush scheme."""

    def test_floating_mode(self) -> None:
        """Slush computes in floats."""
        scheme = slush()
        assert scheme.numeric_mode is NumericMode.FLOATING
        assert not scheme.is_exact

    def test_scores_normalized(self, two_round_history: History) -> None:
        """Each round's score distribution sums to one."""
        for scores in slush_scores(two_round_history):
            assert math.fsum(scores.values()) == pytest.approx(
                1.0, abs=SLUSH_INTERNAL_TOLERANCE
            )

    def test_awards(self, two_round_history: History) -> None:
        """The last share of the last round takes its round-2 score only."""
        awards = slush(1200).awards(two_round_history)
        w = math.exp(-1 / 1200)
        assert awards[2] == pytest.approx(1 / (1 + w + w * w), abs=SLUSH_INTERNAL_TOLERANCE)
        assert math.fsum(awards) == pytest.approx(2.0, abs=SLUSH_INTERNAL_TOLERANCE)
        assert awards[0] == pytest.approx(0.8329, abs=1e-4)

    def test_lambda(self) -> None:
        """lambda must be positive."""
        with pytest.raises(InvalidParamsError):
            slush(0)

    @given(round_lengths)
    def test_score_table_matches_per_round_scores(self, lengths: list) -> None:
        """Awards built in one pass equal the per-round score sums."""
        h = canonical_history(lengths)
        scores = slush_scores(h, 600.0)
        scheme = slush(600)
        awards = scheme.awards(h)
        for share, award in zip(h.shares, awards):
            expected = math.fsum(
                scores[j - 1][share.id]
                for j in range(h.locate(share).round_index, h.num_rounds + 1)
            )
            assert award == pytest.approx(expected, abs=SLUSH_INTERNAL_TOLERANCE)
            assert scheme(share, h) == award

    def test_long_history(self) -> None:
        """Two hundred rounds of ten shares are scored in one pass per round."""
        h = canonical_history([10] * 200)
        awards = slush().awards(h)
        assert len(awards) == 2000
        assert math.fsum(awards) == pytest.approx(200.0, rel=1e-9)


class TestIndependenceSchemes:
    """Test cases for schemes 1-6."""

    def test_scheme1(self) -> None:
        """Even rounds pay half."""
        scheme = independence_scheme(1)
        assert scheme.awards(canonical_history([2])) == (Fraction(1, 4),) * 2
        assert scheme.awards(canonical_history([3])) == (Fraction(1, 3),) * 3

    def test_scheme2(self) -> None:
        """The first share takes R - lambda on top of its lambda share."""
        scheme = independence_scheme(2, lam=Fraction(1, 2))
        assert scheme.awards(canonical_history([3])) == (
            Fraction(2, 3),
            Fraction(1, 6),
            Fraction(1, 6),
        )
        assert scheme.awards(canonical_history([1])) == (Fraction(1),)
        with pytest.raises(InvalidParamsError):
            independence_scheme(2, lam=Fraction(1)).awards(canonical_history([2]))

    def test_scheme3(self) -> None:
        """Doubling awards after the first share."""
        assert independence_scheme(3).awards(canonical_history([3])) == (
            Fraction(1, 4),
            Fraction(1, 4),
            Fraction(1, 2),
        )

    def test_scheme4(self) -> None:
        """The parity of the first round decides every award."""
        scheme = independence_scheme(4)
        assert scheme.awards(canonical_history([2, 1])) == (
            Fraction(1, 4),
            Fraction(1, 4),
            Fraction(1, 2),
        )
        assert scheme.awards(canonical_history([1, 2])) == (
            Fraction(1),
            Fraction(1, 2),
            Fraction(1, 2),
        )

    def test_scheme5(self) -> None:
        """Twice proportional."""
        assert independence_scheme(5).awards(canonical_history([2])) == (1, 1)

    def test_scheme6(self) -> None:
        """delta is R/2 when the first two shares are close, R/3 otherwise."""
        scheme = independence_scheme(6, threshold=Fraction(1, 2))
        far = canonical_history([2])
        assert scheme.awards(far) == (Fraction(2, 3), Fraction(1, 3))
        close = validate_history(
            [Share("a", Fraction(1)), Share("b", Fraction(5, 4), True)]
        )
        assert scheme.awards(close) == (Fraction(1, 2), Fraction(1, 2))

    def test_unknown_id(self) -> None:
        """Only ids 1..6 exist."""
        with pytest.raises(UnknownSchemeIdError):
            independence_scheme(7)


class TestPayoutReport:
    """Test cases for payout reports."""

    def test_pending_rounds(self, two_round_history: History) -> None:
        """Pending awards are left out of the sums and flagged per round."""
        report = compute_payout_report(pplns(2), two_round_history)
        assert report.round_sums == (Fraction(3, 2), Fraction(0))
        assert report.round_pending == (False, True)
        assert report.pending == (False, False, True)
        assert report.total == Fraction(3, 2)
        assert report.scheme == "pplns:n=2"

    def test_floating_totals(self, two_round_history: History) -> None:
        """Floating schemes total in floats."""
        report = compute_payout_report(slush(), two_round_history)
        assert isinstance(report.total, float)
        assert report.total == pytest.approx(2.0, abs=SLUSH_INTERNAL_TOLERANCE)


class TestSchemeSpec:
    """Test cases for scheme specification strings."""

    def test_parameters_checked_against_r(self) -> None:
        """delta and Scheme 2 lambda are judged against the configured R."""
        with pytest.raises(InvalidDeltaError):
            parse_scheme_spec("kpseudo:k=3,delta=2")
        with pytest.raises(InvalidParamsError):
            parse_scheme_spec("indep:id=2,lambda=5")
        assert parse_scheme_spec("kpseudo:k=3,delta=2", Fraction(3)).params["delta"] == 2
        assert parse_scheme_spec("indep:id=2,lambda=5", Fraction(6)).params["lambda"] == 5
        assert parse_scheme_spec("kpseudo:k=3,delta=2", check_net=False).params["k"] == 3
        with pytest.raises(InvalidParamsError):
            independence_scheme(2, lam=Fraction(0))

    def test_parse(self) -> None:
        """Name and parameters build the matching scheme."""
        scheme = parse_scheme_spec("pplns:n=3")
        assert scheme.name == "pplns"
        assert scheme.params == {"n": 3}
        assert scheme.spec == "pplns:n=3"
        assert parse_scheme_spec("geometric:r=3/2").params == {"r": Fraction(3, 2)}
        assert parse_scheme_spec("slush:lambda=600").params == {"lambda": 600.0}
        assert parse_scheme_spec("indep:id=6,t=1/4").params["t"] == Fraction(1, 4)

    def test_defaults(self) -> None:
        """PPS defaults to R/3 and k-pseudo to k = infinity, delta = 0."""
        assert parse_scheme_spec("pps").params == {"c": Fraction(1, 3)}
        assert parse_scheme_spec("pps", Fraction(3)).params == {"c": Fraction(1)}
        kpseudo = parse_scheme_spec("kpseudo:k=inf,delta=1/2")
        assert kpseudo.params == {"k": None, "delta": Fraction(1, 2)}

    def test_epsilon_sources(self, tmp_path: Path) -> None:
        """eps is the harmonic table of size nmax or a JSON file."""
        assert parse_scheme_spec("absfair:nmax=4").params["eps"] == EpsilonTable.harmonic(4)
        assert parse_scheme_spec("relfair", epsilon_n_max=5).params["eps"].n_max == 5
        path = tmp_path / "eps.json"
        path.write_text(json.dumps(["1", "1/2", "1/4", "1/4"]))
        scheme = parse_scheme_spec(f"relfair:eps=@{path}")
        assert scheme.params["eps"].values[-1] == Fraction(1, 4)

    def test_grammar_errors(self) -> None:
        """Unknown names, unknown keys and missing values are spec errors."""
        for spec in ("nope", "pplns", "pplns:x=1", "pplns:n", "pplns:n=abc", "absfair:eps=flat"):
            with pytest.raises(SchemeSpecError):
                parse_scheme_spec(spec)

    def test_range_errors(self) -> None:
        """Out-of-range parameters surface as SchemeError."""
        for spec in ("geometric:r=1", "pplns:n=0", "indep:id=9", "slush:lambda=-1"):
            with pytest.raises(SchemeError):
                parse_scheme_spec(spec)

    def test_table_schemes(self) -> None:
        """The pinned reproduction schemes."""
        names = [name for name, _ in table_schemes()]
        assert names == ["PPS", "PPLNS", "Geometric", "Constrained Geometric", "IC", "Slush"]
