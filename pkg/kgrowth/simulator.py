"""Define a discrete-time simulation of freemium user-base growth."""
from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from datetime import date
from enum import Enum
from fractions import Fraction
from itertools import product
import logging
from types import MappingProxyType
from typing import Union

from kgrowth.errors import ConfigError, GateError
from kgrowth.metrics import k_growth_flow
from kgrowth.model import (
    Granularity,
    Number,
    PeriodAggregate,
    PeriodKey,
    Ratio,
    round_half_away,
)

_LOGGER: logging.Logger = logging.getLogger(__name__)

DEFAULT_GATE_WINDOW: int = 4
DEFAULT_GATE_THRESHOLD: Fraction = Fraction(1)
DEFAULT_TRACE_ANCHOR = date(2014, 5, 5)

Coefficient = Union[Fraction, float, int, str]


def _exact(value: Coefficient) -> Fraction:
    """Return a coefficient as an exact fraction (0.2 becomes 1/5)."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class SimParams:  # pylint: disable=too-many-instance-attributes
    """Define the parameters of one simulation run."""

    k_viral: Fraction
    r_retention: Fraction
    market_size: int
    horizon: int
    initial_active: int = 0
    organic_per_period: int = 0
    paid_schedule: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Normalize coefficients and validate every field."""
        object.__setattr__(self, "k_viral", _exact(self.k_viral))
        object.__setattr__(self, "r_retention", _exact(self.r_retention))
        object.__setattr__(
            self, "paid_schedule", MappingProxyType(dict(self.paid_schedule))
        )

        if self.k_viral < 0:
            raise ConfigError("k_viral", "must be >= 0")
        if not 0 <= self.r_retention < 1:
            raise ConfigError("r_retention", "must be in [0, 1)")
        if self.market_size <= 0:
            raise ConfigError("market_size", "must be > 0")
        if self.horizon <= 0:
            raise ConfigError("horizon", "must be > 0")
        if not 0 <= self.initial_active <= self.market_size:
            raise ConfigError("initial_active", "must be in [0, market_size]")
        if self.organic_per_period < 0:
            raise ConfigError("organic_per_period", "must be >= 0")
        for index, count in self.paid_schedule.items():
            if not 0 <= index < self.horizon:
                raise ConfigError("paid_schedule", f"period {index} outside horizon")
            if count < 0:
                raise ConfigError("paid_schedule", f"negative count at {index}")

    def paid(self, index: int) -> int:
        """Return the purchased users injected after period index."""
        return self.paid_schedule.get(index, 0)


@dataclass(frozen=True)
class SimState:
    """Define the population at one period index."""

    t: int
    active: int
    cumulative_acquired: int
    new_this_period: int
    invited_this_period: int


@dataclass(frozen=True)
class SimTrace:
    """Define the full history of a run."""

    states: tuple[SimState, ...]

    def to_aggregates(
        self,
        start: date = DEFAULT_TRACE_ANCHOR,
        granularity: Granularity = Granularity.WEEK,
    ) -> list[PeriodAggregate]:
        """Return the trace as period aggregates (active as dAU, new as dNAU)."""
        period = PeriodKey(granularity, start)
        aggregates = []
        for state in self.states:
            aggregates.append(
                PeriodAggregate(
                    period,
                    dU=state.active,
                    dNU=state.new_this_period,
                    dAU=state.active,
                    dNAU=state.new_this_period,
                    dIU=state.invited_this_period,
                    cumulative_users=state.cumulative_acquired,
                )
            )
            period = PeriodKey(granularity, period.start + granularity.step)
        return aggregates


def saturation_factor(cumulative: int, market_size: int) -> Fraction:
    """Return the share of the market not yet acquired (1 when empty, 0 when full)."""
    if market_size <= 0:
        raise ValueError("market_size must be positive")
    if not 0 <= cumulative <= market_size:
        raise ValueError("cumulative must be in [0, market_size]")
    return max(Fraction(0), 1 - Fraction(cumulative, market_size))


def _cut(excess: int, amounts: tuple[int, int, int]) -> tuple[int, int, int]:
    """Remove excess from the amounts in order, never taking one below zero."""
    remaining = []
    for amount in amounts:
        cut = min(excess, amount)
        excess -= cut
        remaining.append(amount - cut)
    return remaining[0], remaining[1], remaining[2]


def initial_state(params: SimParams) -> SimState:
    """Return the state before the first step."""
    return SimState(
        t=0,
        active=params.initial_active,
        cumulative_acquired=params.initial_active,
        new_this_period=params.initial_active,
        invited_this_period=0,
    )


def step(state: SimState, params: SimParams) -> SimState:
    """Advance the population by one period.

    Invitees of this period's active users arrive next period. At the market
    ceiling the inflow is cut back viral first, then organic, then paid.
    """
    damping = saturation_factor(state.cumulative_acquired, params.market_size)
    viral = round_half_away(params.k_viral * state.active * damping)
    organic = params.organic_per_period
    paid = params.paid(state.t)

    room = params.market_size - state.cumulative_acquired
    excess = max(0, viral + organic + paid - room)
    if excess:
        _LOGGER.debug("t=%s: market ceiling cuts %s arrival(s)", state.t, excess)
        viral, organic, paid = _cut(excess, (viral, organic, paid))

    inflow = viral + organic + paid
    return SimState(
        t=state.t + 1,
        active=round_half_away(params.r_retention * state.active) + inflow,
        cumulative_acquired=state.cumulative_acquired + inflow,
        new_this_period=inflow,
        invited_this_period=viral,
    )


def run(params: SimParams) -> SimTrace:
    """Run the simulation for the whole horizon."""
    states = [initial_state(params)]
    for _ in range(params.horizon):
        states.append(step(states[-1], params))
    _LOGGER.debug(
        "Simulated %s period(s): final active %s, cumulative %s",
        params.horizon,
        states[-1].active,
        states[-1].cumulative_acquired,
    )
    return SimTrace(tuple(states))


def measure_k_growth(trace: SimTrace) -> list[Ratio | None]:
    """Return the flow K-growth of every step (None after an empty period)."""
    if len(trace.states) < 2:
        raise ValueError("Need at least two states to measure K-growth")
    return [
        k_growth_flow(
            current.active,
            current.new_this_period,
            current.invited_this_period,
            previous.active,
        )
        for previous, current in zip(trace.states, trace.states[1:])
    ]


def saturation_period(trace: SimTrace, params: SimParams) -> int | None:
    """Return the first index at which damped virality can't sustain growth.

    That is the first t with k·saturation_factor + r < 1. Runs whose
    undamped coefficient k + r is not above 1 never grew virally, so they
    have no saturation period.
    """
    if params.k_viral + params.r_retention <= 1:
        return None
    for state in trace.states:
        damping = saturation_factor(state.cumulative_acquired, params.market_size)
        if params.k_viral * damping + params.r_retention < 1:
            return state.t
    return None


class GateDecision(str, Enum):
    """Define the outcome of the launch gate."""

    LAUNCH = "LAUNCH"
    ITERATE = "ITERATE"


def windowed_mean(series: Sequence[Number], window: int) -> Number:
    """Return the mean of the last min(window, len(series)) values."""
    if not series:
        raise GateError("Can't evaluate an empty K-growth series")
    if window < 1:
        raise GateError("window must be at least 1")
    tail = list(series[-window:])
    return sum(tail) / len(tail)


def launch_gate(
    k_growth_series: Sequence[Number],
    window: int = DEFAULT_GATE_WINDOW,
    threshold: Number = DEFAULT_GATE_THRESHOLD,
) -> GateDecision:
    """Return LAUNCH when the windowed mean K-growth reaches the threshold."""
    if windowed_mean(k_growth_series, window) >= threshold:
        return GateDecision.LAUNCH
    return GateDecision.ITERATE


@dataclass(frozen=True)
class SweepPoint:
    """Define the summary of one run in a parameter sweep."""

    k_viral: Fraction
    r_retention: Fraction
    final_active: int
    final_cumulative: int
    saturation_period: int | None
    mean_k_growth: Ratio | None
    decision: GateDecision | None


def summarize(params: SimParams, window: int = DEFAULT_GATE_WINDOW) -> SweepPoint:
    """Run one simulation and summarize it."""
    trace = run(params)
    measured = [value for value in measure_k_growth(trace) if value is not None]
    mean = None
    decision = None
    if measured:
        mean = Fraction(windowed_mean(measured, window))
        decision = launch_gate(measured, window)
    return SweepPoint(
        k_viral=params.k_viral,
        r_retention=params.r_retention,
        final_active=trace.states[-1].active,
        final_cumulative=trace.states[-1].cumulative_acquired,
        saturation_period=saturation_period(trace, params),
        mean_k_growth=mean,
        decision=decision,
    )


def sweep(
    params: SimParams,
    k_values: Iterable[Coefficient],
    r_values: Iterable[Coefficient],
    window: int = DEFAULT_GATE_WINDOW,
) -> list[SweepPoint]:
    """Run the simulation over every (k, r) pair of a grid."""
    points = [
        summarize(replace(params, k_viral=_exact(k), r_retention=_exact(r)), window)
        for k, r in product(list(k_values), list(r_values))
    ]
    _LOGGER.debug("Swept %s parameter point(s)", len(points))
    return points
