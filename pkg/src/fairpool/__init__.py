"""Fairpool - reward sharing schemes for mining pools and checkers for their fairness axioms."""

from ._version import __version__
from .axioms import (
    AxiomChecker,
    AxiomId,
    AxiomVerdict,
    CheckBudget,
    Counterexample,
    VerdictResult,
    check_all,
    check_axiom,
    replay,
)
from .config import FairpoolConfig
from .core import canonical_history, extend_round, omega, rank, restrict, time_shift, validate_history
from .exceptions import (
    CheckError,
    CodecError,
    ConfigError,
    FairpoolError,
    HarnessError,
    HistoryError,
    SchemeError,
    UsageError,
)
from .models import History, Pending, RewardConfig, Share
from .schemes import EpsilonTable, Scheme, compute_payout_report, parse_scheme_spec
from .simulation import SimConfig, SimResult, simulate_pool
from .tables import TableReport, reproduce_table1, reproduce_table2

__all__ = [
    "__version__",
    "AxiomChecker",
    "AxiomId",
    "AxiomVerdict",
    "CheckBudget",
    "Counterexample",
    "VerdictResult",
    "check_all",
    "check_axiom",
    "replay",
    "FairpoolConfig",
    "canonical_history",
    "extend_round",
    "omega",
    "rank",
    "restrict",
    "time_shift",
    "validate_history",
    "CheckError",
    "CodecError",
    "ConfigError",
    "FairpoolError",
    "HarnessError",
    "HistoryError",
    "SchemeError",
    "UsageError",
    "History",
    "Pending",
    "RewardConfig",
    "Share",
    "EpsilonTable",
    "Scheme",
    "compute_payout_report",
    "parse_scheme_spec",
    "SimConfig",
    "SimResult",
    "simulate_pool",
    "TableReport",
    "reproduce_table1",
    "reproduce_table2",
]
