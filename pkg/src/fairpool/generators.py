"""Exhaustive and seeded random history streams for the axiom checkers."""

import hashlib
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, List, Tuple

from .constants import (
    DEFAULT_MAX_ROUNDS,
    DEFAULT_N_MAX,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    RANDOM_MAX_GAP_STEPS,
    RANDOM_MAX_ROUNDS,
    RANDOM_MAX_SHARES,
    RANDOM_TIME_STEP,
)
from .core import canonical_history
from .models import History, RewardConfig

logger = logging.getLogger(__name__)


class GeneratorMode(Enum):
    EXHAUSTIVE = "exhaustive"
    RANDOM = "random"


@dataclass(frozen=True)
class HistoryGenerator:
    """Parameters of one history stream.

    Exhaustive mode yields every round-length composition with total shares
    at most ``n_max`` and at most ``max_rounds`` parts, timed 1..n. Random
    mode makes ``trials`` draws, each a pure function of ``seed`` and the
    trial index alone, and keeps those within ``n_max`` and ``max_rounds``.
    A larger budget therefore keeps every history a smaller one kept.
    """

    mode: GeneratorMode = GeneratorMode.EXHAUSTIVE
    n_max: int = DEFAULT_N_MAX
    max_rounds: int = DEFAULT_MAX_ROUNDS
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    reward: RewardConfig = field(default_factory=RewardConfig)

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError(f"n_max must be at least 1, got {self.n_max}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be at least 1, got {self.max_rounds}")
        if self.trials < 0:
            raise ValueError(f"trials must be >= 0, got {self.trials}")


def derive_rng(seed: int, *path: object) -> random.Random:
    """Return a Random seeded from sha256 of the seed and a path.

    Each trial draws from its own generator, so trial k is the same no
    matter how many trials run before or after it.
    """
    material = "/".join(str(part) for part in (seed, *path))
    digest = hashlib.sha256(material.encode()).hexdigest()[:16]
    return random.Random(int(digest, 16))


def compositions(total: int, max_parts: int) -> Iterator[Tuple[int, ...]]:
    """Yield the compositions of ``total`` into at most ``max_parts`` positive parts.

    Fewer parts come first; within a part count the order is lexicographic.
    """
    for parts in range(1, min(total, max_parts) + 1):
        yield from _compositions_exact(total, parts)


def _compositions_exact(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions_exact(total - first, parts - 1):
            yield (first, *rest)


def exhaustive_shapes(n_max: int, max_rounds: int) -> List[Tuple[int, ...]]:
    """Every round-length tuple with total at most ``n_max``, smallest first."""
    return [
        shape
        for total in range(1, n_max + 1)
        for shape in compositions(total, max_rounds)
    ]


def random_history(rng: random.Random, reward: RewardConfig) -> History:
    """Draw one history with random round lengths and random rational times.

    Sizes run up to RANDOM_MAX_SHARES shares in RANDOM_MAX_ROUNDS rounds
    whatever the search budget is.
    """
    size = rng.randint(1, RANDOM_MAX_SHARES)
    num_rounds = rng.randint(1, min(RANDOM_MAX_ROUNDS, size))
    lengths = [1] * num_rounds
    for _ in range(size - num_rounds):
        lengths[rng.randrange(num_rounds)] += 1

    time = RANDOM_TIME_STEP * rng.randint(1, RANDOM_MAX_GAP_STEPS)
    times = []
    for _ in range(sum(lengths)):
        times.append(time)
        time += RANDOM_TIME_STEP * rng.randint(1, RANDOM_MAX_GAP_STEPS)
    return canonical_history(lengths, reward, times)


def generate_histories(gen: HistoryGenerator) -> Iterator[History]:
    """Yield the history stream described by ``gen``."""
    if gen.mode is GeneratorMode.EXHAUSTIVE:
        shapes = exhaustive_shapes(gen.n_max, gen.max_rounds)
        logger.debug("Enumerating %d history shapes", len(shapes))
        for shape in shapes:
            yield canonical_history(shape, gen.reward)
        return

    kept = 0
    for trial in range(gen.trials):
        h = random_history(derive_rng(gen.seed, "history", trial), gen.reward)
        if len(h) <= gen.n_max and h.num_rounds <= gen.max_rounds:
            kept += 1
            yield h
    logger.debug("Kept %d of %d random draws", kept, gen.trials)


def instance_stream(
    n_max: int,
    max_rounds: int,
    seed: int,
    trials: int,
    reward: RewardConfig,
) -> Iterator[History]:
    """The exhaustive set followed by the random draws that fit the budget."""
    yield from generate_histories(
        HistoryGenerator(GeneratorMode.EXHAUSTIVE, n_max, max_rounds, seed, 0, reward)
    )
    yield from generate_histories(
        HistoryGenerator(GeneratorMode.RANDOM, n_max, max_rounds, seed, trials, reward)
    )
