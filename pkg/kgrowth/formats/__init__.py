"""Define event-log readers."""
from __future__ import annotations

from collections.abc import Iterator
from datetime import datetime
import logging
from typing import TYPE_CHECKING, Any

from kgrowth.errors import (
    RULE_INVALID_VALUE,
    RULE_MISSING_FIELD,
    RULE_UNEXPECTED_FIELD,
    RULE_UNKNOWN_FIELD,
    RULE_UNKNOWN_KIND,
)
from kgrowth.model import Channel, Event, EventKind

if TYPE_CHECKING:
    from kgrowth.ingest import ValidationReport

_LOGGER: logging.Logger = logging.getLogger(__name__)

FIELDS = (
    "ts",
    "kind",
    "user",
    "duration_s",
    "channel",
    "inviter",
    "invite_id",
    "link_id",
)
REQUIRED_FIELDS = ("ts", "kind", "user")


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC 3339 timestamp; an offset is mandatory."""
    if value.endswith(("Z", "z")):
        value = f"{value[:-1]}+00:00"
    parsed = datetime.fromisoformat(value)
    if parsed.tzinfo is None:
        raise ValueError("timestamp has no UTC offset")
    return parsed


class EventReader:
    """Define an object that turns one wire format into events."""

    def __init__(self, report: ValidationReport, *, strict: bool = False) -> None:
        """Initialize."""
        self.report = report
        self.strict = strict

    def records(self, text: str) -> Iterator[tuple[int, dict[str, Any]]]:
        """Yield (line number, raw field mapping) pairs."""
        raise NotImplementedError

    def read(self, text: str) -> list[tuple[int, Event]]:
        """Return every well-formed event along with its line number."""
        events = []
        for line_no, record in self.records(text):
            event = self.to_event(line_no, record)
            if event is not None:
                events.append((line_no, event))
        _LOGGER.debug("Read %s event(s) with %s", len(events), type(self).__name__)
        return events

    def flag_unknown_fields(self, line_no: int, names: list[str]) -> None:
        """Report fields outside the known set (an error only in strict mode)."""
        for name in names:
            if self.strict:
                self.report.add_error(line_no, RULE_UNKNOWN_FIELD, name)
            else:
                self.report.add_warning(line_no, RULE_UNKNOWN_FIELD, name)

    def to_event(  # pylint: disable=too-many-branches
        self, line_no: int, record: dict[str, Any]
    ) -> Event | None:
        """Convert a raw field mapping into an event, reporting every problem."""
        record = {key: value for key, value in record.items() if value is not None}
        self.flag_unknown_fields(line_no, [key for key in record if key not in FIELDS])

        problems: list[tuple[str, str]] = [
            (RULE_MISSING_FIELD, name) for name in REQUIRED_FIELDS if name not in record
        ]
        if problems:
            for rule_id, detail in problems:
                self.report.add_error(line_no, rule_id, detail)
            return None

        try:
            kind = EventKind(record["kind"])
        except ValueError:
            self.report.add_error(line_no, RULE_UNKNOWN_KIND, str(record["kind"]))
            return None

        fields: dict[str, Any] = {"kind": kind}

        try:
            fields["ts"] = parse_timestamp(str(record["ts"]))
        except ValueError as err:
            problems.append((RULE_INVALID_VALUE, f"ts ({err})"))

        fields["user_id"] = str(record["user"])
        if not fields["user_id"]:
            problems.append((RULE_INVALID_VALUE, "user is empty"))

        if kind is EventKind.SESSION:
            if "duration_s" not in record:
                problems.append((RULE_MISSING_FIELD, "duration_s"))
            else:
                duration = self.coerce_duration(record["duration_s"])
                if duration is None:
                    problems.append((RULE_INVALID_VALUE, "duration_s"))
                fields["duration_s"] = duration
        elif "duration_s" in record:
            problems.append((RULE_UNEXPECTED_FIELD, "duration_s"))

        if kind is EventKind.REGISTER:
            if "channel" not in record:
                problems.append((RULE_MISSING_FIELD, "channel"))
            else:
                try:
                    fields["channel"] = Channel(record["channel"])
                except ValueError:
                    problems.append(
                        (RULE_INVALID_VALUE, f"channel {record['channel']}")
                    )
        elif "channel" in record:
            problems.append((RULE_UNEXPECTED_FIELD, "channel"))

        if kind is EventKind.INVITE_DIRECT and "invite_id" not in record:
            problems.append((RULE_MISSING_FIELD, "invite_id"))
        if kind is EventKind.LINK_PUBLISH and "link_id" not in record:
            problems.append((RULE_MISSING_FIELD, "link_id"))

        for source_name, field_name in (
            ("inviter", "inviter_id"),
            ("invite_id", "invite_id"),
            ("link_id", "link_id"),
        ):
            if source_name in record:
                fields[field_name] = str(record[source_name])

        if problems:
            for rule_id, detail in problems:
                self.report.add_error(line_no, rule_id, detail)
            return None

        return Event(**fields)

    @staticmethod
    def coerce_duration(value: Any) -> int | None:
        """Return a non-negative integer duration, or None if the value isn't one."""
        if isinstance(value, bool):
            return None
        if isinstance(value, str):
            try:
                value = int(value)
            except ValueError:
                return None
        if not isinstance(value, int) or value < 0:
            return None
        return value
