"""Define the command-line interface."""
from __future__ import annotations

from collections.abc import Callable
from functools import wraps
import logging
from pathlib import Path
from typing import Any, TypeVar, cast

import click
import pandas as pd
from rich.console import Console
from rich.logging import RichHandler

from kgrowth.config import (
    Command,
    OutputFormat,
    Rounding,
    RunConfig,
    load_simulation_config,
)
from kgrowth.errors import (
    ConfigError,
    EventLogError,
    GateError,
    InputFormatError,
    SeriesError,
    raise_for_report,
)
from kgrowth.ingest import (
    DEFAULT_ACTIVE_THRESHOLD_S,
    EventLog,
    ValidationReport,
    build_registry,
    bucketize,
    parse_events,
    read_aggregates,
)
from kgrowth.metrics import CoefficientSeries, compute_series
from kgrowth.model import Granularity, PeriodAggregate
from kgrowth.report import (
    TRACE_COLUMNS,
    aggregate_records,
    kfactor_records,
    render_records,
    render_table,
    series_columns,
    series_records,
    series_table,
    sweep_records,
    to_csv,
    trace_records,
)
from kgrowth.simulator import (
    DEFAULT_GATE_THRESHOLD,
    DEFAULT_GATE_WINDOW,
    GateDecision,
    launch_gate,
    measure_k_growth,
    run,
    saturation_period,
    sweep as run_sweep,
    windowed_mean,
)

_LOGGER: logging.Logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_ITERATE = 3

F = TypeVar("F", bound=Callable[..., Any])


def exit_on_error(func: F) -> F:
    """Map package errors onto exit codes."""

    @wraps(func)
    def decorator(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except EventLogError as err:
            for line in err.report.render():
                click.echo(line, err=True)
            raise click.exceptions.Exit(EXIT_INVALID) from err
        except ConfigError as err:
            click.echo(f"invalid config: {err}", err=True)
            raise click.exceptions.Exit(EXIT_INVALID) from err
        except (GateError, InputFormatError, SeriesError) as err:
            click.echo(f"error: {err}", err=True)
            raise click.exceptions.Exit(EXIT_INVALID) from err
        except OSError as err:
            click.echo(f"i/o error: {err}", err=True)
            raise click.exceptions.Exit(EXIT_IO) from err

    return cast(F, decorator)


def _emit(text: str, output: Path | None) -> None:
    """Write command output to a file or standard output."""
    if output is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        output.write_text(text, encoding="utf-8")


def _load_log(config: RunConfig) -> tuple[EventLog, ValidationReport]:
    """Read, validate and return the event log of a run."""
    result = parse_events(
        config.inputs[0].read_bytes(), config.event_format, strict=config.strict
    )
    if isinstance(result, ValidationReport):
        raise_for_report(result)
    log = cast(EventLog, result)
    return log, ValidationReport(warnings=list(log.warnings))


def _load_aggregates(config: RunConfig) -> list[PeriodAggregate]:
    """Return the aggregates of a run, from raw events or pre-aggregated input."""
    _LOGGER.debug("Loading %s for %s", config.inputs[0], config.command.value)
    if config.pre_aggregated:
        return read_aggregates(config.inputs[0].read_bytes(), config.granularity)
    log, report = _load_log(config)
    registry = build_registry(log, report)
    for line in report.render():
        click.echo(line, err=True)
    return bucketize(log, registry, config.granularity, config.active_threshold_s)


path_argument = click.argument(
    "path", type=click.Path(dir_okay=False, path_type=Path)
)
output_option = click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False, writable=True, path_type=Path),
    help="Write to a file instead of standard output.",
)
format_option = click.option(
    "--format",
    "output_format",
    type=click.Choice([item.value for item in OutputFormat]),
    default=OutputFormat.TABLE.value,
    show_default=True,
)
bucket_option = click.option(
    "--bucket",
    type=click.Choice([item.value for item in Granularity]),
    default=Granularity.WEEK.value,
    show_default=True,
)
threshold_s_option = click.option(
    "--active-threshold",
    type=click.IntRange(min=1),
    default=DEFAULT_ACTIVE_THRESHOLD_S,
    show_default=True,
    help="Seconds of session time a user must exceed to count as active.",
)
strict_option = click.option(
    "--strict", is_flag=True, help="Reject unknown fields instead of warning."
)
window_option = click.option(
    "--window",
    type=click.IntRange(min=1),
    default=DEFAULT_GATE_WINDOW,
    show_default=True,
    help="Number of trailing periods averaged by the launch gate.",
)


@click.group()
@click.version_option(version="2024.06.0", prog_name="kgrowth")
@click.option("--verbose", "-v", is_flag=True, help="Log debug output.")
def cli(verbose: bool) -> None:
    """Virality, retention and K-growth analytics for freemium products."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


@cli.command()
@path_argument
@strict_option
@exit_on_error
def validate(path: Path, strict: bool) -> None:
    """Validate an event log (exit 0 when it has no errors)."""
    config = RunConfig(Command.VALIDATE, inputs=(path,), strict=strict)
    log, report = _load_log(config)
    registry = build_registry(log, report)
    for line in report.render():
        click.echo(line, err=True)
    click.echo(
        f"ok: {len(log.events)} event(s), {len(registry)} user(s), "
        f"{len(report.warnings)} warning(s)",
        err=True,
    )


@cli.command()
@path_argument
@bucket_option
@threshold_s_option
@format_option
@strict_option
@output_option
@exit_on_error
def aggregate(  # pylint: disable=too-many-arguments
    path: Path,
    bucket: str,
    active_threshold: int,
    output_format: str,
    strict: bool,
    output: Path | None,
) -> None:
    """Bucketize an event log into per-period counts."""
    config = RunConfig(
        Command.AGGREGATE,
        inputs=(path,),
        granularity=Granularity(bucket),
        active_threshold_s=active_threshold,
        output_format=OutputFormat(output_format),
        strict=strict,
    )
    records = aggregate_records(_load_aggregates(config))
    _emit(render_records(records, config.output_format), output)


@cli.command()
@path_argument
@click.option(
    "--pre-aggregated",
    is_flag=True,
    help="Read period_start/xAU/xNU/xIU counts instead of raw events.",
)
@bucket_option
@threshold_s_option
@format_option
@click.option(
    "--rounding",
    type=click.Choice([item.value for item in Rounding]),
    default=Rounding.PERCENT.value,
    show_default=True,
)
@click.option(
    "--kfactor-series",
    type=click.Path(dir_okay=False, writable=True, path_type=Path),
    help="Also write a plot-ready (period_start, k_factor) CSV here.",
)
@strict_option
@output_option
@exit_on_error
def metrics(  # pylint: disable=too-many-arguments
    path: Path,
    pre_aggregated: bool,
    bucket: str,
    active_threshold: int,
    output_format: str,
    rounding: str,
    kfactor_series: Path | None,
    strict: bool,
    output: Path | None,
) -> None:
    """Compute K-factor, K-retention and K-growth per period."""
    config = RunConfig(
        Command.METRICS,
        inputs=(path,),
        granularity=Granularity(bucket),
        active_threshold_s=active_threshold,
        output_format=OutputFormat(output_format),
        rounding=Rounding(rounding),
        pre_aggregated=pre_aggregated,
        strict=strict,
    )
    series: CoefficientSeries = compute_series(_load_aggregates(config))

    if config.output_format is OutputFormat.TABLE:
        text = render_table(series_table(series, config.rounding))
    else:
        text = render_records(
            series_records(series, config.rounding),
            config.output_format,
            columns=series_columns(config.rounding),
        )
    _emit(text, output)

    if kfactor_series is not None:
        kfactor_series.write_text(
            to_csv(kfactor_records(series), ["period_start", "k_factor"]),
            encoding="utf-8",
        )


@cli.command()
@path_argument
@format_option
@window_option
@output_option
@exit_on_error
def simulate(path: Path, output_format: str, window: int, output: Path | None) -> None:
    """Run a growth simulation from a JSON config file."""
    config = RunConfig(
        Command.SIMULATE,
        inputs=(path,),
        output_format=OutputFormat(output_format),
        window=window,
    )
    params, _ = load_simulation_config(config.inputs[0])
    trace = run(params)
    _emit(
        render_records(
            trace_records(trace), config.output_format, TRACE_COLUMNS, "Simulation"
        ),
        output,
    )

    measured = [value for value in measure_k_growth(trace) if value is not None]
    mean = (
        f"{float(windowed_mean(measured, config.window)):.4f}" if measured else "n/a"
    )
    reached = saturation_period(trace, params)
    click.echo(
        f"final active {trace.states[-1].active}; "
        f"cumulative {trace.states[-1].cumulative_acquired} of {params.market_size}; "
        f"saturation period {'not reached' if reached is None else reached}; "
        f"mean K-growth over last {config.window} {mean}",
        err=True,
    )


def _read_k_growth(path: Path) -> list[float]:
    """Return the present k_growth values of a metrics or simulation output file."""
    try:
        if path.suffix.lower() == ".json":
            frame = pd.read_json(path, orient="records")
        else:
            frame = pd.read_csv(path)
    except pd.errors.EmptyDataError as err:
        raise InputFormatError(f"{path} is empty") from err
    except ValueError as err:
        raise InputFormatError(f"{path} is not a records table ({err})") from err
    if "k_growth" not in frame.columns:
        raise InputFormatError(f"{path} has no k_growth column")
    values = pd.to_numeric(frame["k_growth"], errors="coerce").dropna()
    return [float(value) for value in values]


@cli.command()
@path_argument
@window_option
@click.option(
    "--threshold",
    type=click.FloatRange(min=0),
    default=float(DEFAULT_GATE_THRESHOLD),
    show_default=True,
    help="Minimum windowed mean K-growth for a launch (inclusive).",
)
@exit_on_error
def gate(path: Path, window: int, threshold: float) -> None:
    """Decide LAUNCH (exit 0) or ITERATE (exit 3) from a k_growth column."""
    config = RunConfig(Command.GATE, inputs=(path,), window=window, threshold=threshold)
    series = _read_k_growth(config.inputs[0])
    decision = launch_gate(series, config.window, config.threshold)
    mean = windowed_mean(series, config.window)
    click.echo(
        f"{decision.value} (mean K-growth {mean:.4f} over last "
        f"{min(config.window, len(series))} period(s), threshold {config.threshold})"
    )
    if decision is GateDecision.ITERATE:
        raise click.exceptions.Exit(EXIT_ITERATE)


@cli.command()
@path_argument
@click.option(
    "--k", "k_values", type=float, multiple=True, required=True, help="k_viral value."
)
@click.option(
    "--r",
    "r_values",
    type=float,
    multiple=True,
    required=True,
    help="r_retention value.",
)
@window_option
@format_option
@output_option
@exit_on_error
def sweep(  # pylint: disable=too-many-arguments
    path: Path,
    k_values: tuple[float, ...],
    r_values: tuple[float, ...],
    window: int,
    output_format: str,
    output: Path | None,
) -> None:
    """Run the simulation config over a grid of k_viral and r_retention values."""
    config = RunConfig(
        Command.SWEEP,
        inputs=(path,),
        window=window,
        output_format=OutputFormat(output_format),
    )
    params, _ = load_simulation_config(config.inputs[0])
    points = run_sweep(params, k_values, r_values, config.window)
    _emit(
        render_records(sweep_records(points), config.output_format, title="Sweep"),
        output,
    )
