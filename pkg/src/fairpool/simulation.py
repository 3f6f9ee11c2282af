"""Stochastic pool simulator for per-miner income statistics."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Tuple, Union

import numpy as np

from .constants import DEFAULT_SEED, DEFAULT_SIM_MAX_ROUND_LENGTH, DEFAULT_SIM_P, DEFAULT_SIM_ROUNDS
from .core import canonical_history
from .exceptions import InvalidParamsError
from .models import Pending, RewardConfig
from .schemes import parse_scheme_spec

logger = logging.getLogger(__name__)

Amount = Union[Fraction, float]


@dataclass(frozen=True)
class SimConfig:
    """One simulation run.

    Attributes:
        weights: Relative hashrate of each miner; normalized internally.
        p: Probability that a share is a full solution.
        rounds: Number of rounds to simulate.
        seed: Root seed; round k draws from the k-th spawned child.
        scheme: Scheme specification string.
        reward: Block reward and fee.
        max_round_length: Cap on the geometric round length.
    """

    weights: Tuple[Fraction, ...] = (Fraction(1), Fraction(1))
    p: float = DEFAULT_SIM_P
    rounds: int = DEFAULT_SIM_ROUNDS
    seed: int = DEFAULT_SEED
    scheme: str = "proportional"
    reward: RewardConfig = field(default_factory=RewardConfig)
    max_round_length: int = DEFAULT_SIM_MAX_ROUND_LENGTH

    def __post_init__(self) -> None:
        weights = tuple(Fraction(w) for w in self.weights)
        if not weights or any(w <= 0 for w in weights):
            raise InvalidParamsError(f"Miner weights must be positive, got {self.weights}")
        if not 0 < self.p < 1:
            raise InvalidParamsError(f"p must be in (0, 1), got {self.p}")
        if self.rounds < 1:
            raise InvalidParamsError(f"rounds must be at least 1, got {self.rounds}")
        if self.max_round_length < 1:
            raise InvalidParamsError(
                f"max_round_length must be at least 1, got {self.max_round_length}"
            )
        object.__setattr__(self, "weights", weights)

    @property
    def probabilities(self) -> np.ndarray:
        total = sum(self.weights)
        return np.array([float(w / total) for w in self.weights])


@dataclass(frozen=True)
class SimResult:
    """Per-miner income statistics over the simulated rounds.

    ``round_totals`` holds the exact confirmed award sum of each round;
    ``pending`` counts PPLNS shares whose window ran past the last round.
    """

    scheme: str
    miners: int
    rounds: int
    mean_income: Tuple[float, ...]
    income_variance: Tuple[float, ...]
    standard_error: Tuple[float, ...]
    share_counts: Tuple[int, ...]
    round_lengths: Tuple[int, ...]
    round_totals: Tuple[Amount, ...]
    pending: int


def _draw_rounds(cfg: SimConfig) -> Tuple[List[int], np.ndarray]:
    probabilities = cfg.probabilities
    lengths: List[int] = []
    owners: List[np.ndarray] = []
    for child in np.random.SeedSequence(cfg.seed).spawn(cfg.rounds):
        rng = np.random.default_rng(child)
        length = min(int(rng.geometric(cfg.p)), cfg.max_round_length)
        lengths.append(length)
        owners.append(rng.choice(len(probabilities), size=length, p=probabilities))
    return lengths, np.concatenate(owners)


def simulate_pool(cfg: SimConfig) -> SimResult:
    """Simulate ``cfg.rounds`` rounds and pay them with ``cfg.scheme``.

    Round lengths are geometric with success probability ``p`` and capped at
    ``max_round_length``; each share goes to a miner drawn by hashrate. Shares
    are timed 1..m.

    Raises:
        SchemeError: If the scheme string is invalid or the scheme rejects
            the generated history.
    """
    scheme = parse_scheme_spec(cfg.scheme, cfg.reward.net)
    lengths, owners = _draw_rounds(cfg)
    history = canonical_history(lengths, cfg.reward)
    awards = scheme.awards(history)

    miners = len(cfg.weights)
    income = np.zeros((cfg.rounds, miners))
    zero: Amount = Fraction(0) if scheme.is_exact else 0.0
    totals: List[Amount] = [zero] * cfg.rounds
    pending = 0
    for position, award in enumerate(awards):
        r = history.locate(history.shares[position]).round_index - 1
        if isinstance(award, Pending):
            pending += 1
            continue
        income[r, owners[position]] += float(award)
        totals[r] += award

    mean = income.mean(axis=0)
    variance = income.var(axis=0, ddof=1) if cfg.rounds > 1 else np.zeros(miners)
    stderr = np.sqrt(variance / cfg.rounds)
    counts = np.bincount(owners, minlength=miners)

    logger.info(
        "Simulated %d rounds (%d shares) with %s; mean incomes %s",
        cfg.rounds,
        len(history),
        scheme.spec,
        np.round(mean, 6).tolist(),
    )
    if pending:
        logger.warning("%d trailing shares still pending and left unpaid", pending)

    return SimResult(
        scheme.spec,
        miners,
        cfg.rounds,
        tuple(mean.tolist()),
        tuple(variance.tolist()),
        tuple(stderr.tolist()),
        tuple(int(c) for c in counts),
        tuple(lengths),
        tuple(totals),
        pending,
    )
