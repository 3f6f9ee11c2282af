"""Data models for pool histories."""

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterator, NamedTuple, Tuple, Union

from .constants import DEFAULT_BLOCK_REWARD, DEFAULT_FEE
from .exceptions import CodecError, InvalidRewardError, UnknownShareError

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


class NumericMode(Enum):
    """Arithmetic a scheme computes its awards in."""

    EXACT = "exact"
    FLOATING = "floating"


@dataclass(frozen=True)
class Share:
    """One submitted partial solution.

    The hash is reduced to an opaque id plus the full-solution flag, the
    only hash property any scheme reads.
    """

    id: str
    time: Fraction
    is_full_solution: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "time", Fraction(self.time))


@dataclass(frozen=True)
class RewardConfig:
    """Block reward B and pool fee f; schemes distribute R = B - f."""

    block_reward: Fraction = DEFAULT_BLOCK_REWARD
    fee: Fraction = DEFAULT_FEE

    def __post_init__(self) -> None:
        block_reward = Fraction(self.block_reward)
        fee = Fraction(self.fee)
        if block_reward < 0:
            raise InvalidRewardError(f"Block reward must be >= 0, got {block_reward}")
        if not 0 <= fee <= block_reward:
            raise InvalidRewardError(
                f"Fee must be between 0 and the block reward {block_reward}, got {fee}"
            )
        object.__setattr__(self, "block_reward", block_reward)
        object.__setattr__(self, "fee", fee)

    @property
    def net(self) -> Fraction:
        """Net reward R = B - f."""
        return self.block_reward - self.fee


class ShareLocation(NamedTuple):
    """Where a share sits in its history."""

    position: int
    round_index: int
    rank: int


@dataclass(frozen=True)
class RoundView:
    """One round P_r of a history."""

    round_index: int
    shares: Tuple[Share, ...]

    @property
    def length(self) -> int:
        return len(self.shares)

    @property
    def full_solution(self) -> Share:
        return self.shares[-1]

    @property
    def first_time(self) -> Fraction:
        return self.shares[0].time

    @property
    def last_time(self) -> Fraction:
        return self.shares[-1].time


@dataclass(frozen=True)
class History:
    """Ordered shares of a pool plus their partition into rounds.

    Instances are built through ``core.validate_history``; the round
    partition is derived from the full-solution flags and cached.
    """

    shares: Tuple[Share, ...]
    reward: RewardConfig = field(default_factory=RewardConfig)

    @cached_property
    def _round_bounds(self) -> Tuple[Tuple[int, int], ...]:
        bounds = []
        start = 0
        for position, share in enumerate(self.shares):
            if share.is_full_solution:
                bounds.append((start, position + 1))
                start = position + 1
        if start < len(self.shares):
            bounds.append((start, len(self.shares)))
        return tuple(bounds)

    @cached_property
    def _locations(self) -> Dict[str, ShareLocation]:
        locations = {}
        for index, (start, end) in enumerate(self._round_bounds, start=1):
            for position in range(start, end):
                locations[self.shares[position].id] = ShareLocation(
                    position, index, position - start + 1
                )
        return locations

    @cached_property
    def rounds(self) -> Tuple[RoundView, ...]:
        """Every round in index order."""
        return tuple(
            RoundView(index, self.shares[start:end])
            for index, (start, end) in enumerate(self._round_bounds, start=1)
        )

    @property
    def num_rounds(self) -> int:
        return len(self._round_bounds)

    @property
    def net_reward(self) -> Fraction:
        return self.reward.net

    @property
    def round_lengths(self) -> Tuple[int, ...]:
        return tuple(end - start for start, end in self._round_bounds)

    def __len__(self) -> int:
        return len(self.shares)

    def __iter__(self) -> Iterator[Share]:
        return iter(self.shares)

    def __contains__(self, share: object) -> bool:
        if isinstance(share, Share):
            return share.id in self._locations
        return share in self._locations

    def locate(self, share: Union[Share, str]) -> ShareLocation:
        """Return position, round index and rank of a share.

        Raises:
            UnknownShareError: If the share is not part of this history.
        """
        share_id = share.id if isinstance(share, Share) else share
        try:
            return self._locations[share_id]
        except KeyError as e:
            raise UnknownShareError(f"Share {share_id!r} is not in the history") from e

    def share(self, share_id: str) -> Share:
        """Return the share with the given id."""
        return self.shares[self.locate(share_id).position]

    def round(self, round_index: int) -> RoundView:
        """Return round ``round_index`` (1-based) without range checks."""
        return self.rounds[round_index - 1]


@dataclass(frozen=True)
class Pending:
    """PPLNS award whose window reaches past the end of the history.

    ``accrued`` is what the share has earned from the full solutions
    already recorded; later blocks can only add to it.
    """

    accrued: Fraction


Award = Union[Fraction, float, Pending]


def parse_rational(text: Union[str, int]) -> Fraction:
    """Parse an integer or "numerator/denominator" string exactly.

    Decimal notation is rejected so that every value round-trips without
    rounding.
    """
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL_RE.match(text.strip()):
        raise CodecError(f"Expected an integer or 'num/den' string, got {text!r}")
    try:
        return Fraction(text.strip())
    except ZeroDivisionError as e:
        raise CodecError(f"Zero denominator in {text!r}") from e


def format_rational(value: Fraction) -> str:
    """Render a rational as a reduced "num/den" string ("n" for integers)."""
    return str(Fraction(value))
