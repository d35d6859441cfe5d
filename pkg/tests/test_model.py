"""Define tests for the shared domain types."""
from datetime import date, datetime, timedelta, timezone
from fractions import Fraction

import pytest

from kgrowth.model import (
    Channel,
    Event,
    EventKind,
    Granularity,
    PeriodAggregate,
    PeriodKey,
    period_of,
    period_range,
    predecessor,
    round_half_away,
    successor,
)

from .common import TEST_WEEK

UTC = timezone.utc


@pytest.mark.parametrize(
    "ts,granularity,start",
    [
        (datetime(2014, 5, 14, 12, tzinfo=UTC), Granularity.WEEK, TEST_WEEK),
        (datetime(2014, 5, 18, 23, 59, 59, tzinfo=UTC), Granularity.WEEK, TEST_WEEK),
        (datetime(2014, 5, 19, tzinfo=UTC), Granularity.WEEK, date(2014, 5, 19)),
        (datetime(2014, 5, 14, 12, tzinfo=UTC), Granularity.DAY, date(2014, 5, 14)),
    ],
)
def test_period_of(ts, granularity, start):
    """Test that a timestamp maps to the period that contains it."""
    period = period_of(ts, granularity)
    assert period.start == start
    assert period.contains(ts)


def test_period_of_uses_utc():
    """Test that offsets are normalized before bucketing."""
    # Monday 01:00 at +02:00 is still Sunday in UTC.
    ts = datetime(2014, 5, 19, 1, tzinfo=timezone(timedelta(hours=2)))
    assert period_of(ts, Granularity.WEEK).start == TEST_WEEK
    assert period_of(ts, Granularity.DAY).start == date(2014, 5, 18)


def test_period_key_rejects_non_monday_week():
    """Test that week keys must start on a Monday."""
    with pytest.raises(ValueError):
        PeriodKey(Granularity.WEEK, date(2014, 5, 13))


def test_period_key_navigation():
    """Test stepping between periods."""
    week = PeriodKey(Granularity.WEEK, TEST_WEEK)
    assert predecessor(week).start == date(2014, 5, 5)
    assert successor(week).start == date(2014, 5, 19)
    assert predecessor(successor(week)) == week
    assert week.end == date(2014, 5, 18)
    assert week.label == "12.05 → 18.05"
    assert PeriodKey(Granularity.DAY, TEST_WEEK).label == "12.05"

    periods = list(period_range(week, PeriodKey(Granularity.WEEK, date(2014, 6, 2))))
    assert [period.start for period in periods] == [
        date(2014, 5, 12),
        date(2014, 5, 19),
        date(2014, 5, 26),
        date(2014, 6, 2),
    ]


def test_period_key_ordering():
    """Test that periods order by start and refuse mixed granularities."""
    week = PeriodKey(Granularity.WEEK, TEST_WEEK)
    assert week < successor(week)
    with pytest.raises(ValueError):
        _ = week < PeriodKey(Granularity.DAY, TEST_WEEK)


def test_event_field_rules():
    """Test that events enforce the per-kind fields."""
    ts = datetime(2014, 5, 12, tzinfo=timezone.utc)
    Event(ts, EventKind.SESSION, "u1", duration_s=0)

    with pytest.raises(ValueError):
        Event(ts, EventKind.SESSION, "u1")
    with pytest.raises(ValueError):
        Event(ts, EventKind.SESSION, "u1", duration_s=-1)
    with pytest.raises(ValueError):
        Event(ts, EventKind.REGISTER, "u1")
    with pytest.raises(ValueError):
        Event(ts, EventKind.INVITE_DIRECT, "u1")
    with pytest.raises(ValueError):
        Event(ts, EventKind.LINK_PUBLISH, "u1", channel=Channel.ORGANIC, link_id="L")
    with pytest.raises(ValueError):
        Event(ts, EventKind.REGISTER, "", channel=Channel.ORGANIC)


def test_event_normalizes_to_utc():
    """Test that event timestamps are stored in UTC."""
    ts = datetime(2014, 5, 12, 10, 30, 15, 999, tzinfo=timezone(timedelta(hours=-5)))
    event = Event(ts, EventKind.REGISTER, "u1", channel=Channel.PAID)
    assert event.ts == datetime(2014, 5, 12, 15, 30, 15, tzinfo=timezone.utc)


def test_channel_is_invited():
    """Test which channels count as invited."""
    assert Channel.INVITED_DIRECT.is_invited
    assert Channel.INVITED_OPEN.is_invited
    assert not Channel.ORGANIC.is_invited
    assert not Channel.PAID.is_invited


@pytest.mark.parametrize(
    "counts",
    [
        {"dU": 1, "dNU": 1, "dAU": 1, "dNAU": 2, "dIU": 0},
        {"dU": 3, "dNU": 2, "dAU": 2, "dNAU": 1, "dIU": 2},
        {"dU": 1, "dNU": 1, "dAU": 2, "dNAU": 0, "dIU": 0},
        {"dU": 1, "dNU": 1, "dAU": -1, "dNAU": 0, "dIU": 0},
    ],
)
def test_period_aggregate_rejects_inconsistent_counts(counts):
    """Test that aggregates enforce the ordering between counts."""
    with pytest.raises(ValueError):
        PeriodAggregate(PeriodKey(Granularity.WEEK, TEST_WEEK), **counts)


def test_period_aggregate_invitations():
    """Test the derived invitation totals."""
    aggregate = PeriodAggregate(
        PeriodKey(Granularity.WEEK, TEST_WEEK),
        dU=3,
        dNU=3,
        dAU=1,
        dNAU=1,
        dIU=0,
        invites_sent=1,
        links_published=2,
        invites_accepted=1,
        joins_via_link=1,
    )
    assert aggregate.invitations == 3
    assert aggregate.invited_joins == 2


@pytest.mark.parametrize(
    "value,expected",
    [
        (Fraction(1, 2), 1),
        (Fraction(-1, 2), -1),
        (Fraction(3, 2), 2),
        (2.5, 3),
        (2.4999, 2),
        (Fraction(5, 297) * 100, 2),
        (0, 0),
    ],
)
def test_round_half_away(value, expected):
    """Test that halves round away from zero."""
    assert round_half_away(value) == expected
