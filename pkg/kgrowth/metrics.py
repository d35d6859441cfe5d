"""Define the virality, retention and growth coefficients."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
import logging

from kgrowth.errors import SeriesError
from kgrowth.model import (
    MetricsRow,
    Number,
    PeriodAggregate,
    Ratio,
    predecessor,
    round_half_away,
)

_LOGGER: logging.Logger = logging.getLogger(__name__)


def _check_counts(*counts: int) -> None:
    """Raise if any count is negative."""
    if any(count < 0 for count in counts):
        raise ValueError("Counts must be non-negative")


def _ratio(numerator: int, denominator: int) -> Ratio | None:
    """Return an exact ratio, or None for a zero denominator."""
    _check_counts(numerator, denominator)
    if denominator == 0:
        return None
    return Fraction(numerator, denominator)


def local_k_factor(dIU: int, dAU: int) -> Ratio | None:  # pylint: disable=invalid-name
    """Return invited active users over all active users."""
    return _ratio(dIU, dAU)


def conversion_rate(invited_users: int, invitations: int) -> Ratio | None:
    """Return invited users over invitations; may exceed 1 for open links."""
    return _ratio(invited_users, invitations)


def invites_per_user(invitations: int, users: int) -> Ratio | None:
    """Return the average number of invitations per user."""
    return _ratio(invitations, users)


def global_k_factor(invites_per_user_: Number, conversion: Number) -> Number:
    """Return invitations per user times conversion."""
    if invites_per_user_ < 0 or conversion < 0:
        raise ValueError("Coefficients must be non-negative")
    return invites_per_user_ * conversion


def local_k_retention(
    dU: int, dNU: int, dU_prev: int  # pylint: disable=invalid-name
) -> Ratio | None:
    """Return returning users over the previous period's users (all-user basis)."""
    _check_counts(dU, dNU, dU_prev)
    if dNU > dU:
        raise ValueError("dNU can't exceed dU")
    return _ratio(dU - dNU, dU_prev)


def local_k_retention_active(
    dAU: int, dNAU: int, dAU_prev: int  # pylint: disable=invalid-name
) -> Ratio | None:
    """Return returning active users over the previous period's active users."""
    _check_counts(dAU, dNAU, dAU_prev)
    if dNAU > dAU:
        raise ValueError("dNAU can't exceed dAU")
    return _ratio(dAU - dNAU, dAU_prev)


def _check_flow(
    dAU: int, dNAU: int, dIU: int, dAU_prev: int  # pylint: disable=invalid-name
) -> None:
    """Raise unless the counts describe a valid period-to-period flow."""
    _check_counts(dAU, dNAU, dIU, dAU_prev)
    if dNAU > dAU or dIU > dNAU:
        raise ValueError("Expected dIU <= dNAU <= dAU")


def k_growth_flow(
    dAU: int, dNAU: int, dIU: int, dAU_prev: int  # pylint: disable=invalid-name
) -> Ratio | None:
    """Return retained plus invited active users over the previous audience.

    This is the authoritative K-growth coefficient.
    """
    _check_flow(dAU, dNAU, dIU, dAU_prev)
    return _ratio(dAU - dNAU + dIU, dAU_prev)


def k_growth_sum(k_factor: Number, k_retention: Number) -> Number:
    """Return K-factor plus K-retention.

    The two terms use different denominators (current vs previous audience),
    so this only approximates k_growth_flow.
    """
    if k_factor < 0 or k_retention < 0:
        raise ValueError("Coefficients must be non-negative")
    return k_factor + k_retention


def k_growth_ratio(
    dAU: int, dAU_prev: int  # pylint: disable=invalid-name
) -> Ratio | None:
    """Return the audience ratio.

    It equals K-growth only when every new user was invited.
    """
    return _ratio(dAU, dAU_prev)


def decompose_growth(
    dAU: int, dNAU: int, dIU: int, dAU_prev: int  # pylint: disable=invalid-name
) -> tuple[Ratio, Ratio] | None:
    """Split k_growth_flow into a retention part and a viral part.

    Both parts share the previous audience as denominator, so they add up to
    k_growth_flow exactly.
    """
    _check_flow(dAU, dNAU, dIU, dAU_prev)
    if dAU_prev == 0:
        return None
    return Fraction(dAU - dNAU, dAU_prev), Fraction(dIU, dAU_prev)


def format_percent(ratio: Number | None) -> int | None:
    """Return a ratio as an integer percent, rounding halves away from zero."""
    if ratio is None:
        return None
    return round_half_away(Fraction(ratio) * 100)


@dataclass(frozen=True)
class CoefficientSeries:
    """Define the per-period coefficients of a gap-free aggregate series."""

    rows: tuple[MetricsRow, ...] = ()
    aggregates: tuple[PeriodAggregate, ...] = ()
    global_k_factor: Ratio | None = None
    global_conversion: Ratio | None = None
    global_invites_per_user: Ratio | None = None

    def k_growth(self) -> list[Ratio]:
        """Return every present K-growth value in period order."""
        return [row.k_growth_flow for row in self.rows if row.k_growth_flow is not None]

    def k_factor_series(self) -> list[tuple[str, float | None]]:
        """Return plot-ready (period start, K-factor) pairs."""
        return [
            (
                row.period.start.isoformat(),
                None if row.k_factor is None else float(row.k_factor),
            )
            for row in self.rows
        ]


def _row(aggregate: PeriodAggregate, previous: PeriodAggregate | None) -> MetricsRow:
    """Return the coefficients of one period."""
    k_factor = local_k_factor(aggregate.dIU, aggregate.dAU)
    row = {
        "k_factor": k_factor,
        "conversion_ipi": conversion_rate(
            aggregate.invited_joins, aggregate.invitations
        ),
        "invites_per_user": invites_per_user(aggregate.invitations, aggregate.dU),
        "invites_per_spreading_user": invites_per_user(
            aggregate.invites_sent, aggregate.spreading_users
        ),
        "links_per_publisher": _ratio(
            aggregate.links_published, aggregate.link_publishers
        ),
    }
    if previous is not None:
        k_retention_active = local_k_retention_active(
            aggregate.dAU, aggregate.dNAU, previous.dAU
        )
        row.update(
            k_retention=local_k_retention(aggregate.dU, aggregate.dNU, previous.dU),
            k_retention_active=k_retention_active,
            k_growth_flow=k_growth_flow(
                aggregate.dAU, aggregate.dNAU, aggregate.dIU, previous.dAU
            ),
            k_growth_ratio=k_growth_ratio(aggregate.dAU, previous.dAU),
        )
        if k_factor is not None and k_retention_active is not None:
            row["k_growth_sum"] = k_growth_sum(k_factor, k_retention_active)
    return MetricsRow(aggregate.period, **row)


def compute_series(aggregates: Sequence[PeriodAggregate]) -> CoefficientSeries:
    """Return the coefficients of every period plus whole-span globals.

    The aggregates must be in increasing period order without gaps.
    """
    for previous, current in zip(aggregates, aggregates[1:]):
        if predecessor(current.period) != previous.period:
            raise SeriesError(
                f"Expected the period before {current.period.start} to be "
                f"{predecessor(current.period).start}, got {previous.period.start}"
            )

    rows = tuple(
        _row(aggregate, aggregates[index - 1] if index else None)
        for index, aggregate in enumerate(aggregates)
    )

    total_invitations = sum(aggregate.invitations for aggregate in aggregates)
    total_invited = sum(aggregate.invited_joins for aggregate in aggregates)
    total_users = aggregates[-1].cumulative_users if aggregates else 0

    conversion = conversion_rate(total_invited, total_invitations)
    per_user = invites_per_user(total_invitations, total_users)
    k_factor = None
    if conversion is not None and per_user is not None:
        k_factor = Fraction(global_k_factor(per_user, conversion))

    _LOGGER.debug("Computed coefficients for %s period(s)", len(rows))
    return CoefficientSeries(
        rows=rows,
        aggregates=tuple(aggregates),
        global_k_factor=k_factor,
        global_conversion=conversion,
        global_invites_per_user=per_user,
    )
