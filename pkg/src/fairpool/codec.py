"""JSON interchange for histories and reports, plus their text renderings.

Rationals travel as "num/den" strings so that every value round-trips
exactly; floating awards (Slush) are plain JSON numbers.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Union

from .axioms import AxiomVerdict, Counterexample
from .constants import DECIMAL_DIGITS
from .core import validate_history
from .exceptions import CodecError
from .fixtures import FixtureResult
from .models import Award, History, Pending, RewardConfig, Share, format_rational, parse_rational
from .schemes import PayoutReport
from .simulation import SimResult
from .tables import TableReport

JsonValue = Union[str, float, int, bool, None, Dict[str, Any], List[Any]]


def amount_to_json(value: Union[Award, int], decimal: bool = False) -> JsonValue:
    if isinstance(value, Pending):
        return {"pending": amount_to_json(value.accrued, decimal)}
    if isinstance(value, float):
        return float(f"{value:.{DECIMAL_DIGITS}g}") if decimal else value
    if decimal:
        return f"{float(value):.{DECIMAL_DIGITS}g}"
    return format_rational(Fraction(value))


def amount_to_text(value: Union[Award, int], decimal: bool = False) -> str:
    if isinstance(value, Pending):
        return f"pending({amount_to_text(value.accrued, decimal)})"
    if isinstance(value, float) or decimal:
        return f"{float(value):.{DECIMAL_DIGITS}g}"
    return format_rational(Fraction(value))


# Histories


def history_to_dict(h: History) -> Dict[str, Any]:
    return {
        "block_reward": format_rational(h.reward.block_reward),
        "fee": format_rational(h.reward.fee),
        "shares": [
            {"id": s.id, "time": format_rational(s.time), "full": s.is_full_solution}
            for s in h.shares
        ],
    }


def history_from_dict(data: Mapping[str, Any]) -> History:
    """Build and validate a history from its JSON document.

    Raises:
        CodecError: If a field is missing or mistyped.
        HistoryError: If the shares do not form a valid history.
    """
    if not isinstance(data, Mapping):
        raise CodecError("History document must be a JSON object")
    try:
        reward = RewardConfig(
            parse_rational(data.get("block_reward", "1")),
            parse_rational(data.get("fee", "0")),
        )
        raw = data["shares"]
        if not isinstance(raw, list):
            raise CodecError("'shares' must be a list")
        shares = []
        for index, item in enumerate(raw):
            if not isinstance(item, Mapping):
                raise CodecError(f"Share {index} must be an object")
            full = item.get("full", False)
            if not isinstance(full, bool):
                raise CodecError(f"Share {index}: 'full' must be a boolean")
            shares.append(Share(str(item["id"]), parse_rational(item["time"]), full))
    except KeyError as e:
        raise CodecError(f"History document is missing field {e}") from e
    return validate_history(shares, reward)


def load_history(path: Union[str, Path]) -> History:
    """Read a history JSON file.

    Raises:
        OSError: If the file cannot be read.
        CodecError: If the file is not a valid history document.
        HistoryError: If the shares do not form a valid history.
    """
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise CodecError(f"{path} is not valid JSON: {e}") from e
    return history_from_dict(data)


def dump_history(h: History, path: Union[str, Path]) -> None:
    with open(path, "w") as f:
        f.write(dumps(history_to_dict(h)))
        f.write("\n")


def dumps(document: Any) -> str:
    """Serialize deterministically: fixed indentation, insertion-ordered keys."""
    return json.dumps(document, indent=2, ensure_ascii=False)


# Reports


def payout_report_to_dict(report: PayoutReport, decimal: bool = False) -> Dict[str, Any]:
    h = report.history
    return {
        "scheme": report.scheme,
        "awards": [
            {
                "id": share.id,
                "round": h.locate(share).round_index,
                "award": amount_to_json(award, decimal),
            }
            for share, award in zip(h.shares, report.awards)
        ],
        "rounds": [
            {
                "round": i,
                "sum": amount_to_json(total, decimal),
                "pending": pending,
            }
            for i, (total, pending) in enumerate(
                zip(report.round_sums, report.round_pending), start=1
            )
        ],
        "total": amount_to_json(report.total, decimal),
    }


def render_payout_text(report: PayoutReport, decimal: bool = False) -> str:
    h = report.history
    width = max(len(s.id) for s in h.shares)
    lines = [f"Scheme: {report.scheme}", f"{'share':<{width}}  round  award"]
    for share, award in zip(h.shares, report.awards):
        round_index = h.locate(share).round_index
        lines.append(
            f"{share.id:<{width}}  {round_index:>5}  {amount_to_text(award, decimal)}"
        )
    for i, (total, pending) in enumerate(
        zip(report.round_sums, report.round_pending), start=1
    ):
        suffix = " (excludes pending)" if pending else ""
        lines.append(f"round {i} sum: {amount_to_text(total, decimal)}{suffix}")
    lines.append(f"total: {amount_to_text(report.total, decimal)}")
    return "\n".join(lines)


def counterexample_to_dict(cex: Counterexample, decimal: bool = False) -> Dict[str, Any]:
    return {
        "histories": [history_to_dict(h) for h in cex.histories],
        "shares": list(cex.shares),
        "rounds": list(cex.rounds),
        "lhs": amount_to_json(cex.lhs, decimal),
        "rhs": amount_to_json(cex.rhs, decimal),
        "relation": cex.relation,
        "description": cex.description,
    }


def verdict_to_dict(verdict: AxiomVerdict, decimal: bool = False) -> Dict[str, Any]:
    return {
        "scheme": verdict.scheme,
        "axiom": verdict.axiom.value,
        "result": verdict.result.value,
        "instances": verdict.instances_checked,
        "skipped": verdict.skipped,
        "excluded": verdict.excluded,
        "witness": (
            counterexample_to_dict(verdict.counterexample, decimal)
            if verdict.counterexample is not None
            else None
        ),
    }


def render_verdicts_text(verdicts: Sequence[AxiomVerdict]) -> str:
    lines = []
    for verdict in verdicts:
        lines.append(verdict.summary())
        if verdict.counterexample is not None:
            cex = verdict.counterexample
            lengths = ",".join(str(n) for n in cex.history.round_lengths)
            lines.append(
                f"  witness: rounds [{lengths}] shares {list(cex.shares)} "
                f"lhs={amount_to_text(cex.lhs)} {cex.relation} rhs={amount_to_text(cex.rhs)}"
            )
    return "\n".join(lines)


def table_to_dict(report: TableReport) -> Dict[str, Any]:
    rows = []
    for name, spec in zip(report.rows, report.schemes):
        witnesses: Dict[str, Any] = {}
        for axiom in report.columns:
            cex = report.cell(name, axiom).verdict.counterexample
            if cex is not None:
                witnesses[axiom.value] = counterexample_to_dict(cex)
        rows.append(
            {
                "scheme": name,
                "spec": spec,
                "cells": report.row_symbols(name),
                "expected": "".join(report.cell(name, a).expected for a in report.columns),
                "reference": report.reference_grid[name],
                "witnesses": witnesses,
            }
        )
    return {
        "table": report.which,
        "title": report.title,
        "columns": [axiom.value for axiom in report.columns],
        "rows": rows,
        "matches": report.matches,
        "discrepancies": [
            {
                "scheme": cell.row,
                "axiom": cell.axiom.value,
                "reference": cell.reference,
                "computed": cell.expected,
                "note": cell.note,
            }
            for cell in report.discrepancies()
        ],
    }


def sim_result_to_dict(result: SimResult, decimal: bool = False) -> Dict[str, Any]:
    return {
        "scheme": result.scheme,
        "rounds": result.rounds,
        "miners": [
            {
                "miner": i,
                "mean_income": mean,
                "variance": var,
                "standard_error": se,
                "shares": count,
            }
            for i, (mean, var, se, count) in enumerate(
                zip(
                    result.mean_income,
                    result.income_variance,
                    result.standard_error,
                    result.share_counts,
                )
            )
        ],
        "round_lengths": list(result.round_lengths),
        "round_totals": [amount_to_json(t, decimal) for t in result.round_totals],
        "pending": result.pending,
    }


def render_sim_text(result: SimResult) -> str:
    lines = [f"Scheme: {result.scheme}, {result.rounds} rounds"]
    for i in range(result.miners):
        lines.append(
            f"miner {i}: mean {result.mean_income[i]:.6g} "
            f"var {result.income_variance[i]:.6g} "
            f"se {result.standard_error[i]:.3g} shares {result.share_counts[i]}"
        )
    if result.pending:
        lines.append(f"{result.pending} shares pending")
    return "\n".join(lines)


def fixtures_to_dict(results: Sequence[FixtureResult]) -> List[Dict[str, Any]]:
    return [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]
