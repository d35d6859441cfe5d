"""Define package errors."""
from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from kgrowth.ingest import ValidationReport


class KGrowthError(Exception):
    """Define a base error."""

    pass


class EventLogError(KGrowthError):
    """Define an error for an event log that failed validation."""

    def __init__(self, report: ValidationReport) -> None:
        """Initialize."""
        super().__init__(f"Event log rejected with {len(report.errors)} error(s)")
        self.report = report


class ConfigError(KGrowthError):
    """Define an error for an invalid simulation config."""

    def __init__(self, key: str, message: str) -> None:
        """Initialize."""
        super().__init__(f"{key}: {message}")
        self.key = key


class InputFormatError(KGrowthError):
    """Define an error for malformed pre-aggregated or series input."""

    pass


class SeriesError(KGrowthError):
    """Define an error for aggregates that are out of order or have gaps."""

    pass


class GateError(KGrowthError):
    """Define an error for a launch gate that can't be evaluated."""

    pass


RULE_SYNTAX = "syntax"
RULE_UNKNOWN_KIND = "unknown-kind"
RULE_UNKNOWN_FIELD = "unknown-field"
RULE_MISSING_FIELD = "missing-field"
RULE_UNEXPECTED_FIELD = "unexpected-field"
RULE_INVALID_VALUE = "invalid-value"
RULE_DUPLICATE_REGISTER = "duplicate-register"
RULE_ACTIVITY_BEFORE_REGISTRATION = "activity-before-registration"
RULE_DANGLING_INVITE = "dangling-invite"
RULE_UNKNOWN_INVITER = "unknown-inviter"

RULE_MESSAGES = {
    RULE_SYNTAX: "malformed line",
    RULE_UNKNOWN_KIND: "unknown event kind",
    RULE_UNKNOWN_FIELD: "unknown field",
    RULE_MISSING_FIELD: "missing required field",
    RULE_UNEXPECTED_FIELD: "field not allowed for this kind",
    RULE_INVALID_VALUE: "invalid field value",
    RULE_DUPLICATE_REGISTER: "duplicate register",
    RULE_ACTIVITY_BEFORE_REGISTRATION: "activity before registration",
    RULE_DANGLING_INVITE: "dangling invite reference, channel downgraded to organic",
    RULE_UNKNOWN_INVITER: "inviter not registered earlier, link dropped",
}


def describe_rule(rule_id: str, detail: str | None = None) -> str:
    """Return the human-readable message for a rule id."""
    try:
        message = RULE_MESSAGES[rule_id]
    except KeyError:
        message = f"unknown rule {rule_id}"
    if detail:
        return f"{message}: {detail}"
    return message


def raise_for_report(report: ValidationReport) -> None:
    """Raise if a validation report holds any error."""
    if report.errors:
        raise EventLogError(report)
