"""Reward sharing schemes as payout functions over (share, history)."""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .constants import (
    DEFAULT_EPSILON_N_MAX,
    PPS_DEFAULT_DIFFICULTY,
    SCHEME2_LAMBDA_SHARE,
    SCHEME6_THRESHOLD,
    SLUSH_DEFAULT_LAMBDA,
    TABLE_GEOMETRIC_R,
    TABLE_IC_D,
    TABLE_PPLNS_N,
)
from .exceptions import (
    CodecError,
    InvalidDeltaError,
    InvalidEpsilonError,
    InvalidParamsError,
    InvalidRatioError,
    RoundTooLongError,
    SchemeSpecError,
    UnknownSchemeIdError,
)
from .models import Award, History, NumericMode, Pending, Share, parse_rational

logger = logging.getLogger(__name__)

AwardFn = Callable[[Share, History], Award]
Amount = Union[Fraction, float]


@dataclass(frozen=True)
class Scheme:
    """A named, parameterized reward sharing scheme.

    Calling the scheme with a share and its history returns the award.
    Exact schemes return ``Fraction``; Slush returns ``float``; PPLNS may
    return ``Pending`` for shares whose window is not yet closed.
    """

    name: str
    params: Mapping[str, Any]
    payout: AwardFn = field(compare=False, repr=False)
    numeric_mode: NumericMode = NumericMode.EXACT
    spec: str = ""
    batch: Optional[Callable[[History], Tuple[Award, ...]]] = field(
        default=None, compare=False, repr=False
    )

    def __call__(self, share: Share, history: History) -> Award:
        return self.payout(share, history)

    def awards(self, history: History) -> Tuple[Award, ...]:
        """Award every share of the history, aligned with its share order."""
        if self.batch is not None:
            return self.batch(history)
        return tuple(self.payout(share, history) for share in history.shares)

    @property
    def is_exact(self) -> bool:
        return self.numeric_mode is NumericMode.EXACT


def _shape(share: Share, history: History) -> Tuple[int, int, Fraction]:
    """Return (rank, round length, net reward) for a share."""
    location = history.locate(share)
    length = history.round(location.round_index).length
    return location.rank, length, history.net_reward


# Epsilon tables


@dataclass(frozen=True)
class EpsilonTable:
    """Finite weight table eps(1..N_max) for the absolute and relative families."""

    values: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        values = tuple(Fraction(v) for v in self.values)
        if not values:
            raise InvalidEpsilonError("Epsilon table must not be empty")
        if values[0] != 1:
            raise InvalidEpsilonError(f"eps(1) must equal 1, got {values[0]}")
        for j, value in enumerate(values, start=1):
            if not 0 <= value <= 1:
                raise InvalidEpsilonError(f"eps({j}) = {value} is outside [0, 1]")
        object.__setattr__(self, "values", values)

    @property
    def n_max(self) -> int:
        return len(self.values)

    def __call__(self, j: int) -> Fraction:
        if j > self.n_max:
            raise RoundTooLongError(
                f"Round length {j} exceeds the epsilon table size {self.n_max}"
            )
        return self.values[j - 1]

    @cached_property
    def _tails(self) -> Tuple[Fraction, ...]:
        # _tails[j] = sum_{i=j+1}^{N_max} eps(i)/(i-1), indexed 0..N_max
        tails = [Fraction(0)] * (self.n_max + 1)
        for j in range(self.n_max - 1, 0, -1):
            tails[j] = tails[j + 1] + self.values[j] / j
        tails[0] = tails[1]
        return tuple(tails)

    def tail(self, j: int, n: Optional[int] = None) -> Fraction:
        """Return sum_{i=j+1}^{n} eps(i)/(i-1), with n defaulting to N_max."""
        n = self.n_max if n is None else n
        return self._tails[j] - self._tails[n]

    def absolute_violations(self) -> List[int]:
        """Ranks j where eps(j) < sum_{i>j}^{N_max} eps(i)/(i-1)."""
        return [j for j in range(1, self.n_max + 1) if self(j) < self.tail(j)]

    def is_absolute_fair(self) -> bool:
        return not self.absolute_violations()

    def check_absolute(self) -> None:
        """Raise InvalidEpsilonError unless the truncated absolute-fair constraint holds."""
        violations = self.absolute_violations()
        if violations:
            j = violations[0]
            raise InvalidEpsilonError(
                f"eps({j}) = {self(j)} is below the tail sum {self.tail(j)} "
                "required for an absolute fair scheme"
            )

    @classmethod
    def harmonic(cls, n_max: int = DEFAULT_EPSILON_N_MAX) -> "EpsilonTable":
        """The table eps(j) = 1/j, under which both families reduce to proportional."""
        return cls(tuple(Fraction(1, j) for j in range(1, n_max + 1)))

    @classmethod
    def constrained_geometric(
        cls, r: Fraction, n_max: int = DEFAULT_EPSILON_N_MAX
    ) -> "EpsilonTable":
        """eps(j) = r^(j-1) (r - 1) / (r^j - 1), under which relative_fair is constrained_geometric.

        The complementary form (r^(j-1) - 1)/(r^j - 1) is 1 - eps(j).
        """
        r = _check_ratio(r)
        values = [r ** (j - 1) * (r - 1) / (r**j - 1) for j in range(1, n_max + 1)]
        return cls(tuple(values))

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "EpsilonTable":
        """Load a table from a JSON array of rational strings."""
        try:
            with open(path) as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidEpsilonError(f"Failed to load epsilon table from {path}: {e}") from e
        if not isinstance(data, list):
            raise InvalidEpsilonError(f"Epsilon table in {path} must be a JSON array")
        try:
            return cls(tuple(parse_rational(v) for v in data))
        except CodecError as e:
            raise InvalidEpsilonError(f"Bad epsilon value in {path}: {e}") from e


# Scheme factories


def proportional() -> Scheme:
    """alpha(s, H) = R / |P(s)|."""

    def payout(share: Share, history: History) -> Award:
        _, length, net = _shape(share, history)
        return net / length

    return Scheme("proportional", {}, payout, spec="proportional")


def absolute_fair(eps: EpsilonTable) -> Scheme:
    """R * (eps(rho) - sum_{i=rho+1}^{|P|} eps(i)/(i-1)).

    Raises:
        InvalidEpsilonError: If the table violates the absolute-fair constraint.
    """
    eps.check_absolute()

    def payout(share: Share, history: History) -> Award:
        rank, length, net = _shape(share, history)
        eps(length)
        return net * (eps(rank) - eps.tail(rank, length))

    return Scheme("absfair", {"eps": eps}, payout, spec="absfair")


def relative_fair(eps: EpsilonTable) -> Scheme:
    """R * eps(rho) * prod_{j=rho+1}^{|P|} (1 - eps(j))."""

    def payout(share: Share, history: History) -> Award:
        rank, length, net = _shape(share, history)
        eps(length)
        award = net * eps(rank)
        for j in range(rank + 1, length + 1):
            award *= 1 - eps(j)
        return award

    return Scheme("relfair", {"eps": eps}, payout, spec="relfair")


def _k_pseudo_award(
    k: Optional[int], delta: Fraction, rank: int, length: int, net: Fraction
) -> Fraction:
    if k is None or length < k:
        return net / length
    if rank < k:
        return (net - delta) / (k - 1)
    if rank == k:
        return delta
    return Fraction(0)


def k_pseudo_proportional(
    k: Optional[int], delta: Fraction, net: Optional[Fraction] = None
) -> Scheme:
    """Proportional below length k; then (R - delta)/(k-1), delta, and zeros.

    Args:
        k: Threshold length, at least 2; None stands for infinity.
        delta: Award of the k-th share, within [0, R].
        net: The R the scheme will run against, checked up front when given.
    """
    if k is not None and k < 2:
        raise InvalidParamsError(f"k must be at least 2 or infinity, got {k}")
    delta = Fraction(delta)
    if delta < 0:
        raise InvalidDeltaError(f"delta must be >= 0, got {delta}")
    if net is not None and delta > net:
        raise InvalidDeltaError(f"delta {delta} exceeds the net reward {net}")

    def payout(share: Share, history: History) -> Award:
        rank, length, net = _shape(share, history)
        if delta > net:
            raise InvalidDeltaError(f"delta {delta} exceeds the net reward {net}")
        return _k_pseudo_award(k, delta, rank, length, net)

    k_text = "inf" if k is None else str(k)
    return Scheme(
        "kpseudo", {"k": k, "delta": delta}, payout, spec=f"kpseudo:k={k_text},delta={delta}"
    )


def pps(c: Fraction) -> Scheme:
    """Pay per share: every share receives the constant ``c``."""
    c = Fraction(c)
    if c <= 0:
        raise InvalidParamsError(f"PPS constant must be > 0, got {c}")

    def payout(share: Share, history: History) -> Award:
        history.locate(share)
        return c

    return Scheme("pps", {"c": c}, payout, spec=f"pps:c={c}")


def pplns(n: int) -> Scheme:
    """Pay per last N shares: R/N for each full solution among s_i .. s_{i+N-1}.

    Equal to (Omega(s_{i+N}) - Omega(s_i)) R / N. When the window runs past
    the history the award is ``Pending`` with what has accrued so far.
    """
    if n < 1:
        raise InvalidParamsError(f"PPLNS window N must be at least 1, got {n}")

    def payout(share: Share, history: History) -> Award:
        location = history.locate(share)
        net = history.net_reward
        last_position = len(history) - 1
        window_end = location.position + n - 1
        end_share = history.shares[min(window_end, last_position)]
        end = history.locate(end_share)
        solutions = end.round_index - location.round_index
        if end_share.is_full_solution:
            solutions += 1
        award = Fraction(solutions, n) * net
        if window_end > last_position:
            return Pending(award)
        return award

    return Scheme("pplns", {"n": n}, payout, spec=f"pplns:n={n}")


def _check_ratio(r: Fraction) -> Fraction:
    r = Fraction(r)
    if r <= 1:
        raise InvalidRatioError(f"Geometric ratio must be > 1, got {r}")
    return r


def geometric(r: Fraction) -> Scheme:
    """(r - 1) / r^(|P| - rho + 1) * B; the fee varies with the round length."""
    r = _check_ratio(r)

    def payout(share: Share, history: History) -> Award:
        rank, length, _ = _shape(share, history)
        return (r - 1) / r ** (length - rank + 1) * history.reward.block_reward

    return Scheme("geometric", {"r": r}, payout, spec=f"geometric:r={r}")


def constrained_geometric(r: Fraction) -> Scheme:
    """Geometric rescaled by r^|P| / (r^|P| - 1) so every round pays B."""
    r = _check_ratio(r)

    def payout(share: Share, history: History) -> Award:
        rank, length, _ = _shape(share, history)
        scale = r**length / (r**length - 1)
        return (r - 1) / r ** (length - rank + 1) * scale * history.reward.block_reward

    return Scheme("cgeometric", {"r": r}, payout, spec=f"cgeometric:r={r}")


def ic_scheme(d: int) -> Scheme:
    """Incentive compatible scheme with expected round length D.

    Short rounds pay R/D per share and the residual to the full solution;
    rounds of length at least D are paid proportionally.
    """
    if d < 1:
        raise InvalidParamsError(f"D must be at least 1, got {d}")

    def payout(share: Share, history: History) -> Award:
        rank, length, net = _shape(share, history)
        if length >= d:
            return net / length
        base = net / d
        if rank < length:
            return base
        return base + (1 - Fraction(length, d)) * net

    return Scheme("ic", {"d": d}, payout, spec=f"ic:d={d}")


def slush_scores(history: History, lam: float = SLUSH_DEFAULT_LAMBDA) -> List[Dict[str, float]]:
    """Per-round score distributions: entry j maps share id to score(s, j+1).

    score(s, j) weights every share recorded up to the end of round j by
    exp((tau(s) - tau(last share of round j)) / lambda), normalized.
    """
    scores = []
    position = 0
    for round_view in history.rounds:
        position += round_view.length
        anchor = float(round_view.last_time)
        weights = [
            math.exp((float(s.time) - anchor) / lam) for s in history.shares[:position]
        ]
        total = math.fsum(weights)
        scores.append(
            {s.id: w / total for s, w in zip(history.shares[:position], weights)}
        )
    return scores


def slush_score_sums(history: History, lam: float = SLUSH_DEFAULT_LAMBDA) -> List[float]:
    """Each share's score summed over its own round and every later one.

    One pass over the rounds; a share recorded by the end of round j has a
    score in round j exactly when its own round index is at most j.
    """
    times = [float(s.time) for s in history.shares]
    partial: List[List[float]] = [[] for _ in times]
    position = 0
    for round_view in history.rounds:
        position += round_view.length
        anchor = float(round_view.last_time)
        weights = [math.exp((t - anchor) / lam) for t in times[:position]]
        total = math.fsum(weights)
        for i, w in enumerate(weights):
            partial[i].append(w / total)
    return [math.fsum(scores) for scores in partial]


def slush(lam: float = SLUSH_DEFAULT_LAMBDA) -> Scheme:
    """Slush: R times the sum of the share's scores over its round and all later ones."""
    lam = float(lam)
    if lam <= 0:
        raise InvalidParamsError(f"lambda must be > 0, got {lam}")

    @lru_cache(maxsize=4)
    def batch(history: History) -> Tuple[Award, ...]:
        net = float(history.net_reward)
        return tuple(net * total for total in slush_score_sums(history, lam))

    def payout(share: Share, history: History) -> Award:
        return batch(history)[history.locate(share).position]

    return Scheme(
        "slush",
        {"lambda": lam},
        payout,
        NumericMode.FLOATING,
        spec=f"slush:lambda={lam:g}",
        batch=batch,
    )


def independence_scheme(
    scheme_id: int,
    lam: Optional[Fraction] = None,
    threshold: Fraction = SCHEME6_THRESHOLD,
    net: Optional[Fraction] = None,
) -> Scheme:
    """Schemes 1-6, each failing exactly one of the six characterizing axioms.

    Args:
        scheme_id: Which scheme, 1..6.
        lam: Scheme 2 constant with 0 < lam < R; defaults to R/2.
        threshold: Scheme 6 time threshold T > 0 on the gap between a
            round's first two shares.
        net: The R the scheme will run against; Scheme 2's lambda is
            checked against it up front when given.
    """
    if scheme_id not in _INDEPENDENCE:
        raise UnknownSchemeIdError(f"Independence scheme id must be 1..6, got {scheme_id}")
    threshold = Fraction(threshold)
    if threshold <= 0:
        raise InvalidParamsError(f"Scheme 6 threshold must be > 0, got {threshold}")
    lam_value = None if lam is None else Fraction(lam)
    if scheme_id == 2 and lam_value is not None:
        if lam_value <= 0 or (net is not None and lam_value >= net):
            raise InvalidParamsError(
                f"Scheme 2 needs 0 < lambda < R, got {lam_value} with R={net}"
            )
    rule = _INDEPENDENCE[scheme_id]

    def payout(share: Share, history: History) -> Award:
        return rule(share, history, lam_value, threshold)

    params: Dict[str, Any] = {"id": scheme_id}
    spec = f"indep:id={scheme_id}"
    if scheme_id == 2 and lam_value is not None:
        params["lambda"] = lam_value
        spec += f",lambda={lam_value}"
    if scheme_id == 6:
        params["t"] = threshold
        spec += f",t={threshold}"
    return Scheme(f"scheme{scheme_id}", params, payout, spec=spec)


def _scheme1(share: Share, history: History, _lam: Any, _t: Any) -> Fraction:
    _, length, net = _shape(share, history)
    return net / length if length % 2 else net / (2 * length)


def _scheme2(share: Share, history: History, lam: Optional[Fraction], _t: Any) -> Fraction:
    rank, length, net = _shape(share, history)
    lam = net * SCHEME2_LAMBDA_SHARE if lam is None else lam
    if not 0 < lam < net:
        raise InvalidParamsError(f"Scheme 2 needs 0 < lambda < R, got {lam} with R={net}")
    if length == 1:
        return net
    if rank == 1:
        return (net - lam) + lam / length
    return lam / length


def _scheme3(share: Share, history: History, _lam: Any, _t: Any) -> Fraction:
    rank, length, net = _shape(share, history)
    denominator = 2 ** (length - 1)
    if rank == 1:
        return net / denominator
    return 2 ** (rank - 2) * net / denominator


def _scheme4(share: Share, history: History, _lam: Any, _t: Any) -> Fraction:
    _, length, net = _shape(share, history)
    return net / length if history.round(1).length % 2 else net / (2 * length)


def _scheme5(share: Share, history: History, _lam: Any, _t: Any) -> Fraction:
    _, length, net = _shape(share, history)
    return 2 * net / length


def _scheme6(share: Share, history: History, _lam: Any, threshold: Fraction) -> Fraction:
    location = history.locate(share)
    round_view = history.round(location.round_index)
    net = history.net_reward
    if round_view.length == 1:
        return net
    gap = abs(round_view.shares[1].time - round_view.shares[0].time)
    delta = net / 2 if gap < threshold else net / 3
    return _k_pseudo_award(2, delta, location.rank, round_view.length, net)


_INDEPENDENCE: Dict[int, Callable[[Share, History, Any, Fraction], Fraction]] = {
    1: _scheme1,
    2: _scheme2,
    3: _scheme3,
    4: _scheme4,
    5: _scheme5,
    6: _scheme6,
}


# Reports


@dataclass(frozen=True)
class PayoutReport:
    """Awards for every share of a history with per-round and grand totals.

    Round sums and the total cover confirmed awards only; rounds holding a
    Pending share are flagged in ``round_pending``.
    """

    scheme: str
    history: History
    awards: Tuple[Award, ...]
    round_sums: Tuple[Amount, ...]
    round_pending: Tuple[bool, ...]
    total: Amount

    @property
    def pending(self) -> Tuple[bool, ...]:
        return tuple(isinstance(award, Pending) for award in self.awards)


def _zero(scheme: Scheme) -> Amount:
    return Fraction(0) if scheme.is_exact else 0.0


def compute_payout_report(scheme: Scheme, h: History) -> PayoutReport:
    """Evaluate ``scheme`` on every share of ``h``."""
    awards = scheme.awards(h)
    round_sums: List[Amount] = []
    round_pending: List[bool] = []
    position = 0
    for round_view in h.rounds:
        members = awards[position : position + round_view.length]
        position += round_view.length
        round_sums.append(
            sum((a for a in members if not isinstance(a, Pending)), _zero(scheme))
        )
        round_pending.append(any(isinstance(a, Pending) for a in members))
    total = sum(round_sums, _zero(scheme))
    logger.debug("Payout for %s over %d shares: total %s", scheme.spec, len(h), total)
    return PayoutReport(
        scheme.spec, h, awards, tuple(round_sums), tuple(round_pending), total
    )


# Specification strings

_SPEC_KEYS: Dict[str, Tuple[str, ...]] = {
    "proportional": (),
    "absfair": ("eps", "nmax"),
    "relfair": ("eps", "nmax"),
    "kpseudo": ("k", "delta"),
    "pps": ("c",),
    "pplns": ("n",),
    "geometric": ("r",),
    "cgeometric": ("r",),
    "ic": ("d",),
    "slush": ("lambda",),
    "indep": ("id", "lambda", "t"),
}


def _split_spec(spec: str) -> Tuple[str, Dict[str, str]]:
    name, _, rest = spec.strip().partition(":")
    name = name.strip().lower()
    if name not in _SPEC_KEYS:
        raise SchemeSpecError(
            f"Unknown scheme {name!r}; expected one of {', '.join(sorted(_SPEC_KEYS))}"
        )
    params: Dict[str, str] = {}
    for item in filter(None, (part.strip() for part in rest.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip().lower()
        if not sep or not value.strip():
            raise SchemeSpecError(f"Parameter {item!r} in {spec!r} must be key=value")
        if key not in _SPEC_KEYS[name]:
            raise SchemeSpecError(f"Scheme {name!r} takes no parameter {key!r}")
        params[key] = value.strip()
    return name, params


def _int(params: Mapping[str, str], key: str, default: Optional[int] = None) -> int:
    if key not in params:
        if default is None:
            raise SchemeSpecError(f"Missing required parameter {key!r}")
        return default
    try:
        return int(params[key])
    except ValueError as e:
        raise SchemeSpecError(f"Parameter {key!r} must be an integer, got {params[key]!r}") from e


def _rational(params: Mapping[str, str], key: str, default: Optional[Fraction] = None) -> Fraction:
    if key not in params:
        if default is None:
            raise SchemeSpecError(f"Missing required parameter {key!r}")
        return default
    try:
        return parse_rational(params[key])
    except CodecError as e:
        raise SchemeSpecError(f"Parameter {key!r}: {e}") from e


def _epsilon(params: Mapping[str, str], default_n_max: int) -> EpsilonTable:
    source = params.get("eps", "harmonic")
    n_max = _int(params, "nmax", default_n_max)
    if source.startswith("@"):
        return EpsilonTable.from_json(source[1:])
    if source.lower() == "harmonic":
        return EpsilonTable.harmonic(n_max)
    raise SchemeSpecError(f"eps must be 'harmonic' or '@file.json', got {source!r}")


def parse_scheme_spec(
    spec: str,
    default_net: Fraction = Fraction(1),
    epsilon_n_max: int = DEFAULT_EPSILON_N_MAX,
    check_net: bool = True,
) -> Scheme:
    """Build a scheme from a specification string such as ``pplns:n=3``.

    Args:
        spec: Scheme name plus optional comma-separated key=value parameters.
        default_net: Net reward used for defaults expressed relative to R
            (the PPS constant R/3).
        epsilon_n_max: Size of the 1/j table when the spec does not set nmax.
        check_net: Validate R-relative parameters (k-pseudo delta, Scheme 2
            lambda) against ``default_net``; off for syntax-only checks.

    Raises:
        SchemeSpecError: If the string does not parse.
        SchemeError: If the parameters are outside their admissible range.
    """
    name, params = _split_spec(spec)
    net = default_net if check_net else None
    builders: Dict[str, Callable[[], Scheme]] = {
        "proportional": proportional,
        "absfair": lambda: absolute_fair(_epsilon(params, epsilon_n_max)),
        "relfair": lambda: relative_fair(_epsilon(params, epsilon_n_max)),
        "kpseudo": lambda: k_pseudo_proportional(
            None if params.get("k", "inf").lower() in ("inf", "infinity") else _int(params, "k"),
            _rational(params, "delta", Fraction(0)),
            net,
        ),
        "pps": lambda: pps(_rational(params, "c", default_net / PPS_DEFAULT_DIFFICULTY)),
        "pplns": lambda: pplns(_int(params, "n")),
        "geometric": lambda: geometric(_rational(params, "r")),
        "cgeometric": lambda: constrained_geometric(_rational(params, "r")),
        "ic": lambda: ic_scheme(_int(params, "d")),
        "slush": lambda: slush(_float(params, "lambda", SLUSH_DEFAULT_LAMBDA)),
        "indep": lambda: independence_scheme(
            _int(params, "id"),
            _rational(params, "lambda") if "lambda" in params else None,
            _rational(params, "t", SCHEME6_THRESHOLD),
            net,
        ),
    }
    scheme = builders[name]()
    return replace(scheme, spec=spec.strip())


def _float(params: Mapping[str, str], key: str, default: float) -> float:
    if key not in params:
        return default
    try:
        return float(params[key])
    except ValueError as e:
        raise SchemeSpecError(f"Parameter {key!r} must be a number, got {params[key]!r}") from e


def table_schemes(net: Fraction = Fraction(1)) -> Iterable[Tuple[str, Scheme]]:
    """The six well-known schemes with the parameters pinned for reproduction."""
    return (
        ("PPS", pps(net / PPS_DEFAULT_DIFFICULTY)),
        ("PPLNS", pplns(TABLE_PPLNS_N)),
        ("Geometric", geometric(TABLE_GEOMETRIC_R)),
        ("Constrained Geometric", constrained_geometric(TABLE_GEOMETRIC_R)),
        ("IC", ic_scheme(TABLE_IC_D)),
        ("Slush", slush(SLUSH_DEFAULT_LAMBDA)),
    )
