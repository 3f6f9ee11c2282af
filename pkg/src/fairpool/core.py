"""History construction and the restriction, extension and time-shift operations."""

import logging
from dataclasses import replace
from fractions import Fraction
from typing import Iterable, Optional, Tuple, Union

from .exceptions import (
    DuplicateShareError,
    EmptyHistoryError,
    NonMonotoneTimeError,
    OpenTrailingRoundError,
    OrderViolatedError,
    RoundOutOfRangeError,
)
from .models import History, RewardConfig, RoundView, Share

logger = logging.getLogger(__name__)

ShareRef = Union[Share, str]

EXTENSION_SHARE_ID = "s*"


def validate_history(raw: Iterable[Share], cfg: Optional[RewardConfig] = None) -> History:
    """Build a History from raw shares, enforcing the well-formedness rules.

    Args:
        raw: Shares in submission order.
        cfg: Reward configuration; defaults to B=1, f=0.

    Returns:
        The validated history with its rounds materialized.

    Raises:
        EmptyHistoryError: If there are no shares.
        NonMonotoneTimeError: If two consecutive times tie or decrease.
        DuplicateShareError: If a share id repeats.
        OpenTrailingRoundError: If the final share is not a full solution.
    """
    shares = tuple(raw)
    if not shares:
        raise EmptyHistoryError("History contains no shares")

    for previous, current in zip(shares, shares[1:]):
        if current.time <= previous.time:
            raise NonMonotoneTimeError(
                f"Share {current.id!r} at time {current.time} does not follow "
                f"share {previous.id!r} at time {previous.time}"
            )

    seen = set()
    for share in shares:
        if share.id in seen:
            raise DuplicateShareError(f"Share id {share.id!r} appears more than once")
        seen.add(share.id)

    if not shares[-1].is_full_solution:
        raise OpenTrailingRoundError(
            f"Last share {shares[-1].id!r} is not a full solution; "
            "only terminated rounds can be paid"
        )

    return History(shares, cfg if cfg is not None else RewardConfig())


def canonical_history(
    round_lengths: Iterable[int],
    cfg: Optional[RewardConfig] = None,
    times: Optional[Iterable[Fraction]] = None,
) -> History:
    """Build a history from round lengths, with ids s1..sm and times 1..m."""
    lengths = tuple(round_lengths)
    if any(length < 1 for length in lengths):
        raise ValueError(f"Round lengths must be positive, got {lengths}")
    total = sum(lengths)
    stamps = tuple(times) if times is not None else tuple(
        Fraction(i) for i in range(1, total + 1)
    )
    if len(stamps) != total:
        raise ValueError(f"Expected {total} times, got {len(stamps)}")

    shares = []
    position = 0
    for length in lengths:
        for rank in range(1, length + 1):
            shares.append(
                Share(f"s{position + 1}", stamps[position], rank == length)
            )
            position += 1
    return validate_history(shares, cfg)


def _round_index(h: History, r: int) -> int:
    if not 1 <= r <= h.num_rounds:
        raise RoundOutOfRangeError(
            f"Round {r} is out of range; history has {h.num_rounds} rounds"
        )
    return r


def rounds(h: History) -> Tuple[RoundView, ...]:
    """Return every round of the history in index order."""
    return h.rounds


def round_of(h: History, s: ShareRef) -> RoundView:
    """Return the round P(s) containing share ``s``."""
    return h.round(h.locate(s).round_index)


def rank(h: History, s: ShareRef) -> int:
    """Return the relative rank of ``s`` within its round, starting at 1."""
    return h.locate(s).rank


def omega(h: History, s: ShareRef) -> int:
    """Return the 1-based index of the round containing ``s``."""
    return h.locate(s).round_index


def restrict(h: History, r: int) -> History:
    """Return H|_r, the single-round history made of round ``r`` only."""
    _round_index(h, r)
    return validate_history(h.round(r).shares, h.reward)


def extend_round(h: History, r: int, share_id: Optional[str] = None) -> History:
    """Append a new full solution s* as the last share of round ``r``.

    s* is timed at the midpoint between the old last share of the round and
    the first share of the next round, or one unit after the old last share
    for the final round. The displaced share loses its full-solution flag.
    """
    _round_index(h, r)
    round_view = h.round(r)
    last = round_view.full_solution
    position = h.locate(last).position

    if r < h.num_rounds:
        next_time = h.round(r + 1).first_time
        new_time = (last.time + next_time) / 2
    else:
        new_time = last.time + 1

    new_id = share_id or _fresh_id(h)
    extension = Share(new_id, new_time, True)
    shares = list(h.shares)
    shares[position] = replace(last, is_full_solution=False)
    shares.insert(position + 1, extension)
    logger.debug("Extended round %d with %s at time %s", r, new_id, new_time)
    return validate_history(shares, h.reward)


def _fresh_id(h: History) -> str:
    candidate = EXTENSION_SHARE_ID
    suffix = 1
    while candidate in h:
        candidate = f"{EXTENSION_SHARE_ID}{suffix}"
        suffix += 1
    return candidate


def neighbour_times(
    h: History, s: ShareRef
) -> Tuple[Optional[Fraction], Optional[Fraction]]:
    """Return the times bracketing ``s`` history-wide; None past either end."""
    position = h.locate(s).position
    lower = h.shares[position - 1].time if position > 0 else None
    upper = h.shares[position + 1].time if position + 1 < len(h) else None
    return lower, upper


def time_shift(h: History, s_i: ShareRef, new_time: Fraction) -> History:
    """Move one share to ``new_time`` without changing the submission order.

    Raises:
        OrderViolatedError: If ``new_time`` leaves the open interval between
            the share's history-wide neighbours.
    """
    new_time = Fraction(new_time)
    position = h.locate(s_i).position
    lower, upper = neighbour_times(h, s_i)
    if (lower is not None and new_time <= lower) or (
        upper is not None and new_time >= upper
    ):
        raise OrderViolatedError(
            f"Time {new_time} for share {h.shares[position].id!r} is outside "
            f"the open interval ({lower}, {upper})"
        )

    shares = list(h.shares)
    shares[position] = replace(shares[position], time=new_time)
    return validate_history(shares, h.reward)
