"""Command-line interface for fairpool."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, List, Optional, Sequence, Tuple, Type

import typer
from typer import Option

from ._version import __version__
from .axioms import AxiomId, check_all
from .codec import (
    dumps,
    fixtures_to_dict,
    load_history,
    payout_report_to_dict,
    render_payout_text,
    render_sim_text,
    render_verdicts_text,
    sim_result_to_dict,
    table_to_dict,
    verdict_to_dict,
)
from .config import FairpoolConfig
from .constants import EXIT_AXIOM_FAIL, EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION
from .exceptions import (
    CodecError,
    ConfigError,
    FairpoolError,
    HistoryError,
    SchemeError,
    UsageError,
)
from .fixtures import run_fixture_examples, to_tap
from .models import parse_rational
from .schemes import compute_payout_report, parse_scheme_spec
from .simulation import SimConfig, simulate_pool
from .tables import reproduce_table

logger = logging.getLogger(__name__)

PARSE_ONLY = "parse_only"
COMMANDS = ("payout", "check", "tables", "simulate", "fixtures")

# The usage error class of whichever click typer runs on.
_CLICK_USAGE_ERROR: Type[Exception] = typer.BadParameter.__bases__[0]


@dataclass(frozen=True)
class Command:
    """One parsed invocation; unset numeric flags fall back to the configuration."""

    name: str
    scheme: Optional[str] = None
    history: Optional[Path] = None
    axioms: Tuple[AxiomId, ...] = ()
    which: Tuple[int, ...] = (1, 2)
    n_max: Optional[int] = None
    max_rounds: Optional[int] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    weights: Tuple[Fraction, ...] = (Fraction(1), Fraction(1))
    p: Optional[float] = None
    rounds: Optional[int] = None
    max_round_length: Optional[int] = None
    json_output: bool = False
    decimal: bool = False
    config: Optional[str] = None
    debug: bool = False


def version_callback(value: bool) -> None:
    """Print version and exit."""
    if value:
        typer.echo(__version__)
        raise typer.Exit()


def _scheme_callback(value: Optional[str]) -> Optional[str]:
    if value is None:
        return value
    try:
        parse_scheme_spec(value, check_net=False)
    except (SchemeError, OSError) as e:
        raise typer.BadParameter(str(e), param_hint="--scheme") from e
    return value


def _axiom_callback(values: Optional[List[str]]) -> List[str]:
    for value in values or []:
        try:
            AxiomId.parse(value)
        except ValueError as e:
            raise typer.BadParameter(str(e), param_hint="--axiom") from e
    return values or []


def _weights_callback(value: str) -> str:
    try:
        weights = [parse_rational(part) for part in value.split(",")]
    except CodecError as e:
        raise typer.BadParameter(str(e), param_hint="--weights") from e
    if any(w <= 0 for w in weights):
        raise typer.BadParameter("weights must be positive", param_hint="--weights")
    return value


app = typer.Typer(
    name="fairpool",
    help="Mining-pool reward sharing schemes and their fairness axioms",
    add_completion=True,
)

ConfigOpt = Annotated[
    Optional[str], Option("--config", "-c", help="Path to configuration file")
]
DebugOpt = Annotated[bool, Option("--debug", "-d", help="Enable debug logging")]
JsonOpt = Annotated[bool, Option("--json", help="Emit JSON instead of text")]
DecimalOpt = Annotated[
    bool, Option("--decimal", help="Render rationals with 12 significant digits")
]
SeedOpt = Annotated[
    Optional[int],
    Option("--seed", help="Random seed (default: FAIRPOOL_SEED, config, then 0)"),
]
NMaxOpt = Annotated[
    Optional[int], Option("--n-max", min=2, help="Max shares per generated history")
]
MaxRoundsOpt = Annotated[
    Optional[int], Option("--max-rounds", min=1, help="Max rounds per generated history")
]
TrialsOpt = Annotated[
    Optional[int], Option("--trials", min=0, help="Random draws after the exhaustive set")
]


def _dispatch(ctx: typer.Context, cmd: Command) -> Command:
    if ctx.obj and ctx.obj.get(PARSE_ONLY):
        return cmd
    raise typer.Exit(run(cmd))


@app.command()
def payout(
    ctx: typer.Context,
    scheme: Annotated[
        str,
        Option("--scheme", "-s", help="Scheme spec, e.g. pplns:n=3", callback=_scheme_callback),
    ],
    history: Annotated[Path, Option("--history", help="History JSON file")],
    json_output: JsonOpt = False,
    decimal: DecimalOpt = False,
    config: ConfigOpt = None,
    debug: DebugOpt = False,
) -> Command:
    """Compute every share's award for a history file."""
    return _dispatch(
        ctx,
        Command(
            "payout",
            scheme=scheme,
            history=history,
            json_output=json_output,
            decimal=decimal,
            config=config,
            debug=debug,
        ),
    )


@app.command()
def check(
    ctx: typer.Context,
    scheme: Annotated[
        str,
        Option("--scheme", "-s", help="Scheme spec, e.g. geometric:r=2", callback=_scheme_callback),
    ],
    axiom: Annotated[
        Optional[List[str]],
        Option("--axiom", "-a", help="Axiom to check (repeatable; default all)", callback=_axiom_callback),
    ] = None,
    n_max: NMaxOpt = None,
    max_rounds: MaxRoundsOpt = None,
    trials: TrialsOpt = None,
    seed: SeedOpt = None,
    json_output: JsonOpt = False,
    decimal: DecimalOpt = False,
    config: ConfigOpt = None,
    debug: DebugOpt = False,
) -> Command:
    """Search for counterexamples to the axioms."""
    return _dispatch(
        ctx,
        Command(
            "check",
            scheme=scheme,
            axioms=tuple(AxiomId.parse(a) for a in axiom or []),
            n_max=n_max,
            max_rounds=max_rounds,
            trials=trials,
            seed=seed,
            json_output=json_output,
            decimal=decimal,
            config=config,
            debug=debug,
        ),
    )


@app.command()
def tables(
    ctx: typer.Context,
    which: Annotated[
        Optional[int], Option("--which", "-w", min=1, max=2, help="Table 1 or 2 (default both)")
    ] = None,
    n_max: NMaxOpt = None,
    max_rounds: MaxRoundsOpt = None,
    trials: TrialsOpt = None,
    seed: SeedOpt = None,
    json_output: JsonOpt = False,
    config: ConfigOpt = None,
    debug: DebugOpt = False,
) -> Command:
    """Reproduce the verdict tables and diff them against the expected grids."""
    return _dispatch(
        ctx,
        Command(
            "tables",
            which=(which,) if which else (1, 2),
            n_max=n_max,
            max_rounds=max_rounds,
            trials=trials,
            seed=seed,
            json_output=json_output,
            config=config,
            debug=debug,
        ),
    )


@app.command()
def simulate(
    ctx: typer.Context,
    scheme: Annotated[
        str, Option("--scheme", "-s", help="Scheme spec", callback=_scheme_callback)
    ] = "proportional",
    weights: Annotated[
        str, Option("--weights", help="Comma-separated miner hashrates", callback=_weights_callback)
    ] = "1,1",
    p: Annotated[
        Optional[float], Option("--p", min=0.0, max=1.0, help="Full-solution probability per share")
    ] = None,
    rounds: Annotated[Optional[int], Option("--rounds", min=1, help="Rounds to simulate")] = None,
    max_round_length: Annotated[
        Optional[int], Option("--max-round-length", min=1, help="Cap on round length")
    ] = None,
    seed: SeedOpt = None,
    json_output: JsonOpt = False,
    decimal: DecimalOpt = False,
    config: ConfigOpt = None,
    debug: DebugOpt = False,
) -> Command:
    """Simulate a pool and report per-miner income statistics."""
    return _dispatch(
        ctx,
        Command(
            "simulate",
            scheme=scheme,
            weights=tuple(parse_rational(w) for w in weights.split(",")),
            p=p,
            rounds=rounds,
            max_round_length=max_round_length,
            seed=seed,
            json_output=json_output,
            decimal=decimal,
            config=config,
            debug=debug,
        ),
    )


@app.command()
def fixtures(
    ctx: typer.Context,
    json_output: JsonOpt = False,
    debug: DebugOpt = False,
) -> Command:
    """Evaluate the worked examples and print TAP lines."""
    return _dispatch(ctx, Command("fixtures", json_output=json_output, debug=debug))


@app.callback()
def callback(
    _version: Annotated[
        Optional[bool],
        Option(
            "--version",
            callback=version_callback,
            is_eager=True,
            help="Show version and exit",
        ),
    ] = None,
) -> None:
    """Mining-pool reward sharing schemes and their fairness axioms."""


def parse_args(argv: Sequence[str]) -> Command:
    """Parse ``argv`` into a Command without running it.

    Raises:
        UsageError: On unknown flags, missing values or a bad scheme spec.
        typer.Exit: For eager options such as ``--version`` and ``--help``,
            after they have printed, carrying their exit code.
    """
    command = typer.main.get_command(app)
    try:
        result = command.main(
            args=list(argv),
            prog_name="fairpool",
            standalone_mode=False,
            obj={PARSE_ONLY: True},
        )
    except _CLICK_USAGE_ERROR as e:
        raise UsageError(e.format_message()) from e
    if isinstance(result, int):
        raise typer.Exit(result)
    if not isinstance(result, Command):
        raise UsageError(f"Expected one of: {', '.join(COMMANDS)}")
    return result


def _configure_logging(debug: bool, level: str) -> None:
    if debug:
        logging.basicConfig(level=logging.DEBUG)
    else:
        logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO))


def _emit(cmd: Command, document: Any, text: str) -> None:
    typer.echo(dumps(document) if cmd.json_output else text)


def run(cmd: Command) -> int:
    """Execute a parsed command and return its exit code."""
    try:
        config = FairpoolConfig(cmd.config)
    except ConfigError as e:
        typer.echo(f"Configuration error: {e}", err=True)
        return EXIT_USAGE
    _configure_logging(cmd.debug, config.log_level)

    try:
        return _run(cmd, config)
    except OSError as e:
        typer.echo(f"I/O error: {e}", err=True)
        return EXIT_IO
    except (HistoryError, CodecError, SchemeError) as e:
        typer.echo(f"Invalid input: {e}", err=True)
        return EXIT_VALIDATION
    except ConfigError as e:
        typer.echo(f"Configuration error: {e}", err=True)
        return EXIT_USAGE
    except FairpoolError as e:
        typer.echo(f"fairpool error: {e}", err=True)
        return EXIT_VALIDATION


def _run(cmd: Command, config: FairpoolConfig) -> int:
    if cmd.name == "payout":
        assert cmd.scheme is not None and cmd.history is not None
        h = load_history(cmd.history)
        scheme = parse_scheme_spec(cmd.scheme, h.net_reward, config.epsilon_n_max)
        report = compute_payout_report(scheme, h)
        _emit(cmd, payout_report_to_dict(report, cmd.decimal), render_payout_text(report, cmd.decimal))
        return EXIT_OK

    if cmd.name == "check":
        assert cmd.scheme is not None
        budget = config.budget(cmd.n_max, cmd.max_rounds, cmd.trials, cmd.seed)
        scheme = parse_scheme_spec(cmd.scheme, budget.reward.net, config.epsilon_n_max)
        verdicts = list(check_all(scheme, budget, cmd.axioms or None).values())
        _emit(
            cmd,
            [verdict_to_dict(v, cmd.decimal) for v in verdicts],
            render_verdicts_text(verdicts),
        )
        return EXIT_AXIOM_FAIL if any(v.failed for v in verdicts) else EXIT_OK

    if cmd.name == "tables":
        budget = config.budget(cmd.n_max, cmd.max_rounds, cmd.trials, cmd.seed)
        reports = [reproduce_table(which, budget) for which in cmd.which]
        _emit(
            cmd,
            [table_to_dict(r) for r in reports],
            "\n\n".join(r.render_text() for r in reports),
        )
        return EXIT_OK if all(r.matches for r in reports) else EXIT_AXIOM_FAIL

    if cmd.name == "simulate":
        sim = SimConfig(
            weights=cmd.weights,
            p=config.sim_p if cmd.p is None else cmd.p,
            rounds=config.sim_rounds if cmd.rounds is None else cmd.rounds,
            seed=config.seed if cmd.seed is None else cmd.seed,
            scheme=cmd.scheme or "proportional",
            reward=config.reward,
            max_round_length=(
                config.sim_max_round_length
                if cmd.max_round_length is None
                else cmd.max_round_length
            ),
        )
        result = simulate_pool(sim)
        _emit(cmd, sim_result_to_dict(result, cmd.decimal), render_sim_text(result))
        return EXIT_OK

    if cmd.name == "fixtures":
        results = run_fixture_examples()
        _emit(cmd, fixtures_to_dict(results), "\n".join(to_tap(results)))
        return EXIT_OK if all(r.passed for r in results) else EXIT_AXIOM_FAIL

    raise ValueError(f"Unknown command {cmd.name!r}")


def main() -> None:
    """Console script entry point."""
    app()


if __name__ == "__main__":
    main()
