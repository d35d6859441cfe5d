"""Define event-log parsing, attribution and bucketing."""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from enum import Enum
import io
import logging
from typing import IO, NamedTuple, Union

import pandas as pd

from kgrowth.errors import (
    RULE_ACTIVITY_BEFORE_REGISTRATION,
    RULE_DANGLING_INVITE,
    RULE_DUPLICATE_REGISTER,
    RULE_SYNTAX,
    RULE_UNKNOWN_INVITER,
    InputFormatError,
    describe_rule,
)
from kgrowth.formats import EventReader
from kgrowth.formats.delimited import CsvReader
from kgrowth.formats.jsonl import JsonLinesReader
from kgrowth.model import (
    COUNT_FIELDS,
    Channel,
    Event,
    EventKind,
    Granularity,
    PeriodAggregate,
    PeriodKey,
    UserRecord,
    period_of,
    period_range,
)

_LOGGER: logging.Logger = logging.getLogger(__name__)

DEFAULT_ACTIVE_THRESHOLD_S: int = 300

Source = Union[bytes, str, IO[bytes], IO[str]]


class EventFormat(str, Enum):
    """Define the supported event-log wire formats."""

    JSONL = "jsonl"
    CSV = "csv"


READERS: dict[EventFormat, type[EventReader]] = {
    EventFormat.JSONL: JsonLinesReader,
    EventFormat.CSV: CsvReader,
}


class Issue(NamedTuple):
    """Define one finding of a validation pass."""

    line: int
    rule_id: str
    message: str


@dataclass
class ValidationReport:
    """Define the errors and warnings collected while reading a log."""

    errors: list[Issue] = field(default_factory=list)
    warnings: list[Issue] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        """Return whether the log is accepted."""
        return not self.errors

    def add_error(self, line: int, rule_id: str, detail: str | None = None) -> None:
        """Record an error."""
        self.errors.append(Issue(line, rule_id, describe_rule(rule_id, detail)))

    def add_warning(self, line: int, rule_id: str, detail: str | None = None) -> None:
        """Record a warning."""
        issue = Issue(line, rule_id, describe_rule(rule_id, detail))
        _LOGGER.debug("line %s: %s (%s)", line, issue.message, rule_id)
        self.warnings.append(issue)

    def render(self) -> list[str]:
        """Return one text line per issue, errors first."""
        return [
            f"{severity}: line {issue.line}: [{issue.rule_id}] {issue.message}"
            for severity, issues in (("error", self.errors), ("warning", self.warnings))
            for issue in sorted(issues)
        ]


@dataclass(frozen=True)
class EventLog:
    """Define a validated event log, sorted by timestamp."""

    events: tuple[Event, ...] = ()
    line_numbers: tuple[int, ...] = ()
    warnings: tuple[Issue, ...] = ()

    def line_of(self, index: int) -> int:
        """Return the source line of an event (0 when unknown)."""
        try:
            return self.line_numbers[index]
        except IndexError:
            return 0


def _read_text(source: Source) -> str:
    """Return the decoded text of a source."""
    data = source if isinstance(source, (bytes, str)) else source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8-sig")
    return data


def parse_events(
    source: Source, fmt: EventFormat = EventFormat.JSONL, *, strict: bool = False
) -> EventLog | ValidationReport:
    """Parse and validate an event log.

    Returns the sorted log on success and the report naming every offending
    line on failure.
    """
    report = ValidationReport()
    try:
        text = _read_text(source)
    except UnicodeDecodeError as err:
        report.add_error(0, RULE_SYNTAX, f"not UTF-8 ({err.reason})")
        return report

    reader = READERS[EventFormat(fmt)](report, strict=strict)
    numbered = sorted(reader.read(text), key=lambda pair: pair[1].ts)

    registered: set[str] = set()
    for line_no, event in numbered:
        if event.kind is EventKind.REGISTER:
            if event.user_id in registered:
                report.add_error(line_no, RULE_DUPLICATE_REGISTER, event.user_id)
            registered.add(event.user_id)
        elif event.user_id not in registered:
            report.add_error(line_no, RULE_ACTIVITY_BEFORE_REGISTRATION, event.user_id)

    if report.errors:
        _LOGGER.debug("Rejected event log: %s error(s)", len(report.errors))
        return report

    return EventLog(
        events=tuple(event for _, event in numbered),
        line_numbers=tuple(line_no for line_no, _ in numbered),
        warnings=tuple(report.warnings),
    )


def build_registry(
    log: EventLog, report: ValidationReport | None = None
) -> dict[str, UserRecord]:
    """Return one user record per registered user, keyed by user id.

    Direct invitations are credited to the sender of the matching earlier
    invite; open-link joins are credited to the link's publisher when exactly
    one user ever published it.
    """
    if report is None:
        report = ValidationReport()

    publishers: dict[str, set[str]] = {}
    for event in log.events:
        if event.kind is EventKind.LINK_PUBLISH and event.link_id:
            publishers.setdefault(event.link_id, set()).add(event.user_id)

    senders: dict[str, str] = {}
    registry: dict[str, UserRecord] = {}

    for index, event in enumerate(log.events):
        if event.kind is EventKind.INVITE_DIRECT and event.invite_id:
            senders.setdefault(event.invite_id, event.user_id)
            continue
        if event.kind is not EventKind.REGISTER or event.channel is None:
            continue

        channel = event.channel
        inviter: str | None = None

        if channel is Channel.INVITED_DIRECT:
            if event.invite_id and event.invite_id in senders:
                inviter = senders[event.invite_id]
            else:
                report.add_warning(
                    log.line_of(index),
                    RULE_DANGLING_INVITE,
                    f"{event.user_id} invite_id={event.invite_id}",
                )
                channel = Channel.ORGANIC
        elif channel is Channel.INVITED_OPEN:
            link_publishers = publishers.get(event.link_id or "", set())
            if len(link_publishers) == 1:
                [inviter] = link_publishers

        if inviter is not None:
            earlier = registry.get(inviter)
            if earlier is None or earlier.registered_at >= event.ts:
                report.add_warning(
                    log.line_of(index),
                    RULE_UNKNOWN_INVITER,
                    f"{event.user_id} inviter={inviter}",
                )
                inviter = None

        registry[event.user_id] = UserRecord(
            user_id=event.user_id,
            registered_at=event.ts,
            channel=channel,
            inviter_id=inviter,
        )

    return registry


def _per_period(frame: pd.DataFrame, by: str, column: str | None = None) -> pd.Series:
    """Count rows per period (or distinct values of a column when given)."""
    if column is None:
        return frame.groupby(by).size()
    return frame.groupby(by)[column].nunique()


def bucketize(
    log: EventLog,
    registry: dict[str, UserRecord],
    granularity: Granularity = Granularity.WEEK,
    active_threshold_s: int = DEFAULT_ACTIVE_THRESHOLD_S,
) -> list[PeriodAggregate]:
    """Return one aggregate per period from the first event to the last.

    A user is active in a period when the summed duration of their sessions
    in it strictly exceeds the threshold. Periods without events are
    zero-filled.
    """
    if active_threshold_s <= 0:
        raise ValueError("active_threshold_s must be positive")
    if not log.events:
        return []

    events = pd.DataFrame.from_records(
        [
            (
                period_of(event.ts, granularity).start,
                event.kind.value,
                event.user_id,
                event.duration_s or 0,
            )
            for event in log.events
        ],
        columns=["period", "kind", "user", "duration_s"],
    )
    users = pd.DataFrame.from_records(
        [
            (
                record.user_id,
                period_of(record.registered_at, granularity).start,
                record.channel.value,
                record.is_invited,
            )
            for record in registry.values()
        ],
        columns=["user", "registered", "channel", "invited"],
    )

    sessions = events[events["kind"] == EventKind.SESSION.value]
    if sessions.empty:
        active = pd.DataFrame(columns=["period", "user"])
    else:
        totals = sessions.groupby(["period", "user"])["duration_s"].sum()
        active = totals[totals > active_threshold_s].reset_index()[["period", "user"]]
    active = active.merge(users, on="user", how="left")
    new_active = active[active["period"] == active["registered"]]
    invited_active = new_active[new_active["invited"].astype(bool)]

    invites = events[events["kind"] == EventKind.INVITE_DIRECT.value]
    links = events[events["kind"] == EventKind.LINK_PUBLISH.value]

    table = pd.DataFrame(
        {
            "dU": _per_period(events, "period", "user"),
            "dNU": _per_period(users, "registered"),
            "dAU": _per_period(active, "period", "user"),
            "dNAU": _per_period(new_active, "period", "user"),
            "dIU": _per_period(invited_active, "period", "user"),
            "invites_sent": _per_period(invites, "period"),
            "spreading_users": _per_period(invites, "period", "user"),
            "links_published": _per_period(links, "period"),
            "link_publishers": _per_period(links, "period", "user"),
            "joins_via_link": _per_period(
                users[users["channel"] == Channel.INVITED_OPEN.value], "registered"
            ),
            "invites_accepted": _per_period(
                users[users["channel"] == Channel.INVITED_DIRECT.value], "registered"
            ),
        }
    )

    first = period_of(log.events[0].ts, granularity)
    last = period_of(log.events[-1].ts, granularity)
    starts = [period.start for period in period_range(first, last)]
    table = table.reindex(starts).fillna(0).astype(int)
    table["cumulative_users"] = table["dNU"].cumsum()

    _LOGGER.debug(
        "Bucketized %s event(s) into %s %s period(s)",
        len(log.events),
        len(starts),
        granularity.value,
    )
    return [
        PeriodAggregate(
            PeriodKey(granularity, start), **{k: int(v) for k, v in counts.items()}
        )
        for start, counts in table.to_dict("index").items()
    ]


AGGREGATE_ALIASES = {
    "period_start": "period",
    "xAU": "dAU",
    "xNU": "dNAU",
    "xIU": "dIU",
}
REQUIRED_AGGREGATE_COLUMNS = ("period", "dAU", "dNAU", "dIU")


def read_aggregates(
    source: Source, granularity: Granularity = Granularity.WEEK
) -> list[PeriodAggregate]:
    """Read pre-aggregated counts from CSV.

    Short names (period_start, xAU, xNU, xIU) and aggregate field names
    are both accepted. Missing optional counts default to dU := dAU,
    dNU := dNAU, zero invitation activity and a running-sum cumulative total.
    """
    text = _read_text(source)
    try:
        frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        return []
    frame = frame.rename(columns=AGGREGATE_ALIASES)

    for name in REQUIRED_AGGREGATE_COLUMNS:
        if name not in frame.columns:
            raise InputFormatError(f"Pre-aggregated input lacks column {name}")
    if frame.empty:
        return []

    if "dU" not in frame.columns:
        frame["dU"] = frame["dAU"]
    if "dNU" not in frame.columns:
        frame["dNU"] = frame["dNAU"]

    counts = pd.DataFrame(index=frame.index)
    for name in COUNT_FIELDS:
        if name not in frame.columns:
            continue
        try:
            values = pd.to_numeric(frame[name], errors="raise")
        except (TypeError, ValueError) as err:
            raise InputFormatError(f"Column {name} holds a non-integer") from err
        fractional = values[~(values % 1 == 0)]
        if not fractional.empty:
            row = int(fractional.index[0]) + 2
            raise InputFormatError(
                f"Row {row}: column {name} holds a non-integer ({fractional.iloc[0]})"
            )
        counts[name] = values.astype(int)
    for name in COUNT_FIELDS:
        if name not in counts.columns:
            counts[name] = 0
    if "cumulative_users" not in frame.columns:
        counts["cumulative_users"] = counts["dNU"].cumsum()

    aggregates = []
    for index, raw_period in frame["period"].items():
        try:
            period = PeriodKey(granularity, date.fromisoformat(raw_period.strip()))
            aggregate = PeriodAggregate(
                period, **{name: int(counts.at[index, name]) for name in COUNT_FIELDS}
            )
        except ValueError as err:
            raise InputFormatError(f"Row {int(index) + 2}: {err}") from err
        aggregates.append(aggregate)

    _LOGGER.debug("Read %s pre-aggregated period(s)", len(aggregates))
    return aggregates
