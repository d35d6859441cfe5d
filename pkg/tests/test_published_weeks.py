"""Define tests that reproduce the published weekly growth and invitation tables."""
from fractions import Fraction

from kgrowth.metrics import format_percent
from kgrowth.simulator import GateDecision, launch_gate, windowed_mean

from .common import (
    PUBLISHED_DIRECT_INVITERS,
    PUBLISHED_DIRECT_INVITES,
    PUBLISHED_K_FACTOR,
    PUBLISHED_K_GROWTH,
    PUBLISHED_K_RETENTION,
    PUBLISHED_LINK_JOINS,
    PUBLISHED_LINK_PUBLISHERS,
    PUBLISHED_LINKS,
)


def test_k_factor_row(published_series):
    """Test every K-factor cell."""
    assert [format_percent(row.k_factor) for row in published_series.rows] == (
        PUBLISHED_K_FACTOR
    )


def test_k_retention_row(published_series):
    """Test every K-retention cell (active-user basis)."""
    assert [
        format_percent(row.k_retention_active) for row in published_series.rows
    ] == PUBLISHED_K_RETENTION


def test_k_growth_row(published_series):
    """Test every K-growth cell."""
    assert [
        format_percent(row.k_growth_flow) for row in published_series.rows
    ] == PUBLISHED_K_GROWTH


def test_pre_aggregated_retention_bases_agree(published_series):
    """Test that both retention bases agree when only active counts are known."""
    for row in published_series.rows:
        assert row.k_retention == row.k_retention_active


def test_decomposition_adds_up(published_series):
    """Test that every week's K-growth is retention plus virality on one basis."""
    for previous, current, row in zip(
        published_series.aggregates,
        published_series.aggregates[1:],
        published_series.rows[1:],
    ):
        retained = current.dAU - current.dNAU
        assert row.k_growth_flow * previous.dAU == retained + current.dIU


def test_gate_iterates_on_published_series(published_series):
    """Test that the published K-growth never clears the launch gate."""
    series = published_series.k_growth()
    assert len(series) == 15
    for window in range(3, 7):
        assert 0.38 <= float(windowed_mean(series, window)) <= 0.45
        assert launch_gate(series, window) is GateDecision.ITERATE


def test_invitation_counts_are_read(published_invitation_series):
    """Test that the invitation columns land in the aggregates."""
    aggregates = published_invitation_series.aggregates
    assert [a.invites_sent for a in aggregates] == PUBLISHED_DIRECT_INVITES
    assert [a.spreading_users for a in aggregates] == PUBLISHED_DIRECT_INVITERS
    assert [a.links_published for a in aggregates] == PUBLISHED_LINKS
    assert [a.link_publishers for a in aggregates] == PUBLISHED_LINK_PUBLISHERS
    assert [a.joins_via_link for a in aggregates] == PUBLISHED_LINK_JOINS
    assert all(a.invites_accepted == 0 for a in aggregates)


def test_invitations_leave_growth_rows_unchanged(published_invitation_series):
    """Test that invitation activity doesn't move the growth coefficients."""
    rows = published_invitation_series.rows
    assert [format_percent(row.k_factor) for row in rows] == PUBLISHED_K_FACTOR
    assert [format_percent(row.k_growth_flow) for row in rows] == PUBLISHED_K_GROWTH


def test_invites_per_spreading_user_row(published_invitation_series):
    """Test direct invitations per inviting user, week by week."""
    rows = published_invitation_series.rows
    assert [row.invites_per_spreading_user for row in rows] == [
        Fraction(invites, inviters)
        for invites, inviters in zip(
            PUBLISHED_DIRECT_INVITES, PUBLISHED_DIRECT_INVITERS
        )
    ]
    assert rows[0].invites_per_spreading_user == Fraction(106, 7)
    assert rows[-1].invites_per_spreading_user == Fraction(561, 8)


def test_links_per_publisher_row(published_invitation_series):
    """Test published links per publishing user, absent before links were counted."""
    rows = published_invitation_series.rows
    assert [row.links_per_publisher for row in rows[:3]] == [None, None, None]
    assert [row.links_per_publisher for row in rows[3:]] == [
        Fraction(links, publishers)
        for links, publishers in zip(
            PUBLISHED_LINKS[3:], PUBLISHED_LINK_PUBLISHERS[3:]
        )
    ]
    assert rows[3].links_per_publisher == Fraction(5, 4)
    assert rows[13].links_per_publisher == Fraction(33, 28)


def test_conversion_and_invites_per_user_rows(published_invitation_series):
    """Test weekly conversion of invitations and invitations per user."""
    rows = published_invitation_series.rows
    aggregates = published_invitation_series.aggregates
    for row, aggregate, invites, links, joins in zip(
        rows,
        aggregates,
        PUBLISHED_DIRECT_INVITES,
        PUBLISHED_LINKS,
        PUBLISHED_LINK_JOINS,
    ):
        assert row.conversion_ipi == Fraction(joins, invites + links)
        assert row.invites_per_user == Fraction(invites + links, aggregate.dU)
    assert rows[0].conversion_ipi == Fraction(15, 212)
    assert rows[-1].conversion_ipi == Fraction(5, 566)
    assert rows[-1].invites_per_user == Fraction(1698, 947)


def test_published_global_coefficients(published_invitation_series):
    """Test the whole-span conversion, invitations per user and K-factor."""
    invitations = sum(PUBLISHED_DIRECT_INVITES) + sum(PUBLISHED_LINKS)
    assert invitations == 26678
    assert sum(PUBLISHED_LINK_JOINS) == 482
    assert published_invitation_series.aggregates[-1].cumulative_users == 15361

    assert published_invitation_series.global_conversion == Fraction(482, 26678)
    assert published_invitation_series.global_invites_per_user == Fraction(
        26678, 15361
    )
    assert published_invitation_series.global_k_factor == Fraction(482, 15361)
