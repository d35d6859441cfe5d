"""Define shared domain types and period arithmetic."""
from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from enum import Enum
from fractions import Fraction
from functools import total_ordering
import math
from typing import Iterator, Union

Ratio = Fraction
Number = Union[Fraction, float, int]


class Granularity(str, Enum):
    """Define the size of a time bucket."""

    DAY = "day"
    WEEK = "week"

    @property
    def step(self) -> timedelta:
        """Return the length of one period."""
        if self is Granularity.DAY:
            return timedelta(days=1)
        return timedelta(days=7)


class EventKind(str, Enum):
    """Define the kinds of user action an event log can hold."""

    REGISTER = "register"
    SESSION = "session"
    INVITE_DIRECT = "invite_direct"
    LINK_PUBLISH = "link_publish"


class Channel(str, Enum):
    """Define the acquisition channel of a registration."""

    ORGANIC = "organic"
    PAID = "paid"
    INVITED_DIRECT = "invite_direct"
    INVITED_OPEN = "invite_open"

    @property
    def is_invited(self) -> bool:
        """Return whether users of this channel count as invited users."""
        return self in (Channel.INVITED_DIRECT, Channel.INVITED_OPEN)


def to_utc(ts: datetime) -> datetime:
    """Normalize a timestamp to UTC with second precision.

    Naive timestamps are taken to already be in UTC.
    """
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


@dataclass(frozen=True)
class Event:  # pylint: disable=too-many-instance-attributes
    """Define one timestamped user action."""

    ts: datetime
    kind: EventKind
    user_id: str
    duration_s: int | None = None
    channel: Channel | None = None
    inviter_id: str | None = None
    invite_id: str | None = None
    link_id: str | None = None

    def __post_init__(self) -> None:
        """Enforce the per-kind field rules."""
        object.__setattr__(self, "ts", to_utc(self.ts))
        if not self.user_id:
            raise ValueError("user_id must be non-empty")
        if (self.duration_s is not None) != (self.kind is EventKind.SESSION):
            raise ValueError("duration_s is required for sessions and only for them")
        if self.duration_s is not None and self.duration_s < 0:
            raise ValueError("duration_s must be non-negative")
        if (self.channel is not None) != (self.kind is EventKind.REGISTER):
            raise ValueError("channel is required for registrations and only for them")
        if self.kind is EventKind.INVITE_DIRECT and not self.invite_id:
            raise ValueError("invite_direct events need an invite_id")
        if self.kind is EventKind.LINK_PUBLISH and not self.link_id:
            raise ValueError("link_publish events need a link_id")


@dataclass(frozen=True)
class UserRecord:
    """Define a registered user and how they were acquired."""

    user_id: str
    registered_at: datetime
    channel: Channel
    inviter_id: str | None = None

    @property
    def is_invited(self) -> bool:
        """Return whether the user counts toward IU."""
        return self.channel.is_invited


@total_ordering
@dataclass(frozen=True)
class PeriodKey:
    """Define one time bucket (a UTC day or a Monday-anchored ISO week)."""

    granularity: Granularity
    start: date

    def __post_init__(self) -> None:
        """Reject week keys that don't start on a Monday."""
        if self.granularity is Granularity.WEEK and self.start.weekday() != 0:
            raise ValueError(f"Week periods start on a Monday, got {self.start}")

    def __lt__(self, other: object) -> bool:
        """Order periods of the same granularity by start date."""
        if not isinstance(other, PeriodKey):
            return NotImplemented
        if other.granularity is not self.granularity:
            raise ValueError("Can't compare periods of different granularity")
        return self.start < other.start

    @property
    def end(self) -> date:
        """Return the last day in the period (inclusive)."""
        return self.start + self.granularity.step - timedelta(days=1)

    @property
    def label(self) -> str:
        """Return a short label in the "12.05 → 18.05" style."""
        if self.granularity is Granularity.DAY:
            return self.start.strftime("%d.%m")
        return f"{self.start.strftime('%d.%m')} → {self.end.strftime('%d.%m')}"

    def contains(self, ts: datetime) -> bool:
        """Return whether a timestamp falls inside the period."""
        return self.start <= to_utc(ts).date() <= self.end


def period_of(ts: datetime, granularity: Granularity) -> PeriodKey:
    """Return the unique period containing a timestamp."""
    day = to_utc(ts).date()
    if granularity is Granularity.WEEK:
        day -= timedelta(days=day.weekday())
    return PeriodKey(granularity, day)


def predecessor(period: PeriodKey) -> PeriodKey:
    """Return the immediately preceding period."""
    return PeriodKey(period.granularity, period.start - period.granularity.step)


def successor(period: PeriodKey) -> PeriodKey:
    """Return the immediately following period."""
    return PeriodKey(period.granularity, period.start + period.granularity.step)


def period_range(first: PeriodKey, last: PeriodKey) -> Iterator[PeriodKey]:
    """Yield every period from first to last inclusive."""
    period = first
    while period <= last:
        yield period
        period = successor(period)


@dataclass(frozen=True)
class PeriodAggregate:  # pylint: disable=too-many-instance-attributes,invalid-name
    """Define the raw counts of one period."""

    period: PeriodKey
    dU: int
    dNU: int
    dAU: int
    dNAU: int
    dIU: int
    invites_sent: int = 0
    spreading_users: int = 0
    links_published: int = 0
    link_publishers: int = 0
    joins_via_link: int = 0
    invites_accepted: int = 0
    cumulative_users: int = 0

    def __post_init__(self) -> None:
        """Enforce the ordering between counts."""
        for name in COUNT_FIELDS:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        checks = (
            (self.dNAU <= self.dNU, "dNAU <= dNU"),
            (self.dNAU <= self.dAU, "dNAU <= dAU"),
            (self.dIU <= self.dNAU, "dIU <= dNAU"),
            (self.dAU <= self.dU, "dAU <= dU"),
            (self.spreading_users <= self.dU, "spreading_users <= dU"),
            (self.invites_accepted <= self.dNU, "invites_accepted <= dNU"),
            (self.joins_via_link <= self.dNU, "joins_via_link <= dNU"),
        )
        for holds, rule in checks:
            if not holds:
                raise ValueError(f"{self.period.start}: expected {rule}")

    @property
    def invitations(self) -> int:
        """Return every invitation issued (direct invites plus published links)."""
        return self.invites_sent + self.links_published

    @property
    def invited_joins(self) -> int:
        """Return every registration that came through an invitation."""
        return self.invites_accepted + self.joins_via_link


COUNT_FIELDS = (
    "dU",
    "dNU",
    "dAU",
    "dNAU",
    "dIU",
    "invites_sent",
    "spreading_users",
    "links_published",
    "link_publishers",
    "joins_via_link",
    "invites_accepted",
    "cumulative_users",
)


@dataclass(frozen=True)
class MetricsRow:  # pylint: disable=too-many-instance-attributes
    """Define the derived coefficients of one period.

    Every ratio is None when its denominator is zero or when it needs a
    predecessor period that doesn't exist.
    """

    period: PeriodKey
    k_factor: Ratio | None = None
    conversion_ipi: Ratio | None = None
    invites_per_user: Ratio | None = None
    invites_per_spreading_user: Ratio | None = None
    links_per_publisher: Ratio | None = None
    k_retention: Ratio | None = None
    k_retention_active: Ratio | None = None
    k_growth_flow: Ratio | None = None
    k_growth_sum: Ratio | None = None
    k_growth_ratio: Ratio | None = None


def round_half_away(value: Number) -> int:
    """Round to the nearest integer, with halves rounded away from zero.

    The value is converted to an exact fraction first, so binary floats
    round according to the number they actually hold.
    """
    exact = Fraction(value)
    magnitude = math.floor(abs(exact) + Fraction(1, 2))
    return -magnitude if exact < 0 else magnitude
