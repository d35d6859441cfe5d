"""Define fixtures available for all tests."""
import pytest

from kgrowth.ingest import bucketize, build_registry, parse_events, read_aggregates
from kgrowth.metrics import compute_series

from .common import load_fixture


@pytest.fixture(name="published_aggregates")
def published_aggregates_fixture():
    """Return the published weekly counts as aggregates."""
    return read_aggregates(load_fixture("table5.csv"))


@pytest.fixture(name="published_series")
def published_series_fixture(published_aggregates):
    """Return the coefficient series of the published weekly counts."""
    return compute_series(published_aggregates)


@pytest.fixture(name="six_event_log")
def six_event_log_fixture():
    """Return the parsed six-line event log."""
    return parse_events(load_fixture("events_six.jsonl"))


@pytest.fixture(name="three_user_aggregates")
def three_user_aggregates_fixture():
    """Return the weekly aggregates of the three-user log."""
    log = parse_events(load_fixture("events_three_users.jsonl"))
    return bucketize(log, build_registry(log))


@pytest.fixture(name="published_invitation_series")
def published_invitation_series_fixture():
    """Return the coefficient series of the published counts with invitations."""
    return compute_series(read_aggregates(load_fixture("table5_invitations.csv")))
