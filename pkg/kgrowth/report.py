"""Define renderers for aggregates, coefficient series and simulation traces."""
from __future__ import annotations

from collections.abc import Sequence
import io
import json
from typing import Any, Dict, List

import pandas as pd
from rich.console import Console
from rich.table import Table

from kgrowth.config import OutputFormat, Rounding
from kgrowth.metrics import CoefficientSeries, format_percent
from kgrowth.model import COUNT_FIELDS, PeriodAggregate, Ratio
from kgrowth.simulator import SimTrace, SweepPoint, measure_k_growth

Record = Dict[str, Any]

PERCENT_COLUMNS = ("k_factor_pct", "k_retention_pct", "k_growth_pct")
EXTRA_COUNT_COLUMNS = tuple(
    name for name in COUNT_FIELDS if name not in ("dAU", "dNAU", "dIU")
)
TRACE_COLUMNS = ("t", "active", "new", "invited", "cumulative", "k_growth")
RATIO_COLUMNS = (
    "k_factor",
    "k_retention",
    "k_retention_all",
    "k_growth",
    "k_growth_sum",
    "k_growth_ratio",
    "conversion",
    "invites_per_user",
    "invites_per_spreading_user",
    "links_per_publisher",
)


def _float(value: Ratio | None) -> float | None:
    """Return a ratio as a float, keeping None."""
    return None if value is None else float(value)


def aggregate_records(aggregates: Sequence[PeriodAggregate]) -> list[Record]:
    """Return one record per period, named after the aggregate fields."""
    return [
        {
            "period": aggregate.period.start.isoformat(),
            **{name: getattr(aggregate, name) for name in COUNT_FIELDS},
        }
        for aggregate in aggregates
    ]


def series_columns(rounding: Rounding = Rounding.PERCENT) -> list[str]:
    """Return the report column order."""
    columns = ["period_start", "xAU", "xNU", "xIU"]
    if rounding is Rounding.PERCENT:
        columns += PERCENT_COLUMNS
    columns += RATIO_COLUMNS
    columns += EXTRA_COUNT_COLUMNS
    return columns


def series_records(
    series: CoefficientSeries, rounding: Rounding = Rounding.PERCENT
) -> list[Record]:
    """Return one report record per period in report column order."""
    records = []
    for aggregate, row in zip(series.aggregates, series.rows):
        record: Record = {
            "period_start": row.period.start.isoformat(),
            "xAU": aggregate.dAU,
            "xNU": aggregate.dNAU,
            "xIU": aggregate.dIU,
        }
        if rounding is Rounding.PERCENT:
            record.update(
                k_factor_pct=format_percent(row.k_factor),
                k_retention_pct=format_percent(row.k_retention_active),
                k_growth_pct=format_percent(row.k_growth_flow),
            )
        record.update(
            k_factor=_float(row.k_factor),
            k_retention=_float(row.k_retention_active),
            k_retention_all=_float(row.k_retention),
            k_growth=_float(row.k_growth_flow),
            k_growth_sum=_float(row.k_growth_sum),
            k_growth_ratio=_float(row.k_growth_ratio),
            conversion=_float(row.conversion_ipi),
            invites_per_user=_float(row.invites_per_user),
            invites_per_spreading_user=_float(row.invites_per_spreading_user),
            links_per_publisher=_float(row.links_per_publisher),
        )
        record.update({name: getattr(aggregate, name) for name in EXTRA_COUNT_COLUMNS})
        records.append(record)
    return records


def kfactor_records(series: CoefficientSeries) -> list[Record]:
    """Return the plot-ready K-factor series."""
    return [
        {"period_start": start, "k_factor": k_factor}
        for start, k_factor in series.k_factor_series()
    ]


def trace_records(trace: SimTrace) -> list[Record]:
    """Return one record per simulated period."""
    measured: List[Ratio | None] = [None]
    if len(trace.states) > 1:
        measured += measure_k_growth(trace)
    return [
        {
            "t": state.t,
            "active": state.active,
            "new": state.new_this_period,
            "invited": state.invited_this_period,
            "cumulative": state.cumulative_acquired,
            "k_growth": _float(k_growth),
        }
        for state, k_growth in zip(trace.states, measured)
    ]


def sweep_records(points: Sequence[SweepPoint]) -> list[Record]:
    """Return one record per sweep point."""
    return [
        {
            "k_viral": float(point.k_viral),
            "r_retention": float(point.r_retention),
            "final_active": point.final_active,
            "final_cumulative": point.final_cumulative,
            "saturation_period": point.saturation_period,
            "mean_k_growth": _float(point.mean_k_growth),
            "decision": None if point.decision is None else point.decision.value,
        }
        for point in points
    ]


def to_csv(records: Sequence[Record], columns: Sequence[str] | None = None) -> str:
    """Return records as CSV; absent values become empty cells."""
    if columns is None:
        columns = list(records[0]) if records else []
    if not columns:
        return ""
    frame = pd.DataFrame(list(records), columns=list(columns), dtype=object)
    return str(frame.to_csv(index=False))


def to_json(records: Sequence[Record]) -> str:
    """Return records as a JSON array; absent values become null."""
    return json.dumps(list(records), indent=2)


def _cell(value: Any) -> str:
    """Return the table text of one value."""
    if value is None:
        return ""
    return str(value)


def records_table(records: Sequence[Record], title: str | None = None) -> Table:
    """Return a row-per-record table."""
    table = Table(title=title, show_header=True, header_style="bold cyan")
    columns = list(records[0]) if records else []
    for column in columns:
        table.add_column(column, justify="right")
    for record in records:
        table.add_row(*(_cell(record[column]) for column in columns))
    return table


def series_table(series: CoefficientSeries, rounding: Rounding) -> Table:
    """Return a coefficient series laid out like the published weekly table.

    Periods are columns; counts and coefficients are rows.
    """
    table = Table(
        title="Growth coefficients",
        show_header=True,
        header_style="bold cyan",
    )
    table.add_column("week" if series.rows else "", style="bold")
    for row in series.rows:
        table.add_column(row.period.label, justify="right")

    def ratio_cells(values: list[Ratio | None]) -> list[str]:
        if rounding is Rounding.PERCENT:
            return [_cell(format_percent(value)) for value in values]
        return [_cell(_float(value)) for value in values]

    unit = ", percent" if rounding is Rounding.PERCENT else ""
    table.add_row(
        "All active users (xAU)", *(str(a.dAU) for a in series.aggregates)
    )
    table.add_row(
        "New active users (xNU)", *(str(a.dNAU) for a in series.aggregates)
    )
    table.add_row(
        "Invited active users (xIU)", *(str(a.dIU) for a in series.aggregates)
    )
    table.add_row(
        f"K-Factor = xIU / xAU{unit}",
        *ratio_cells([row.k_factor for row in series.rows]),
    )
    table.add_row(
        f"K-Retention = (xAU - xNU) / xAU-1{unit}",
        *ratio_cells([row.k_retention_active for row in series.rows]),
    )
    table.add_row(
        f"K-Growth = (xAU - xNU + xIU) / xAU-1{unit}",
        *ratio_cells([row.k_growth_flow for row in series.rows]),
    )
    table.caption = (
        f"global K-factor {_cell(_float(series.global_k_factor)) or '-'}, "
        f"conversion {_cell(_float(series.global_conversion)) or '-'}, "
        f"invites per user {_cell(_float(series.global_invites_per_user)) or '-'}"
    )
    return table


def render_table(table: Table) -> str:
    """Return a table as plain text."""
    buffer = io.StringIO()
    width = max(120, 18 * len(table.columns) + 60)
    Console(file=buffer, width=width, no_color=True, highlight=False).print(table)
    return buffer.getvalue()


def render_records(
    records: Sequence[Record],
    output_format: OutputFormat,
    columns: Sequence[str] | None = None,
    title: str | None = None,
) -> str:
    """Return records in the requested output format."""
    if output_format is OutputFormat.CSV:
        return to_csv(records, columns)
    if output_format is OutputFormat.JSON:
        return to_json(records)
    return render_table(records_table(records, title))
