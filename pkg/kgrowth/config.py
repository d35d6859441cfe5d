"""Define run and simulation configuration."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
import json
import logging
from pathlib import Path
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from kgrowth.errors import ConfigError
from kgrowth.ingest import DEFAULT_ACTIVE_THRESHOLD_S, EventFormat
from kgrowth.model import Granularity
from kgrowth.simulator import DEFAULT_GATE_THRESHOLD, DEFAULT_GATE_WINDOW, SimParams

_LOGGER: logging.Logger = logging.getLogger(__name__)


class Command(str, Enum):
    """Define the CLI commands."""

    VALIDATE = "validate"
    AGGREGATE = "aggregate"
    METRICS = "metrics"
    SIMULATE = "simulate"
    GATE = "gate"
    SWEEP = "sweep"


class OutputFormat(str, Enum):
    """Define how results are rendered."""

    TABLE = "table"
    CSV = "csv"
    JSON = "json"


class Rounding(str, Enum):
    """Define how ratios are rendered in tables."""

    PERCENT = "percent"
    RAW = "raw"


@dataclass(frozen=True)
class RunConfig:  # pylint: disable=too-many-instance-attributes
    """Define the options of one CLI invocation."""

    command: Command
    inputs: tuple[Path, ...] = ()
    granularity: Granularity = Granularity.WEEK
    active_threshold_s: int = DEFAULT_ACTIVE_THRESHOLD_S
    output_format: OutputFormat = OutputFormat.TABLE
    rounding: Rounding = Rounding.PERCENT
    pre_aggregated: bool = False
    strict: bool = False
    window: int = DEFAULT_GATE_WINDOW
    threshold: float = float(DEFAULT_GATE_THRESHOLD)

    def __post_init__(self) -> None:
        """Validate the option combination."""
        if not self.inputs:
            raise ValueError(f"{self.command.value} needs an input path")
        if self.active_threshold_s <= 0:
            raise ValueError("active_threshold_s must be positive")
        if self.window < 1:
            raise ValueError("window must be at least 1")

    @property
    def event_format(self) -> EventFormat:
        """Return the event format implied by the first input's suffix."""
        if self.inputs and self.inputs[0].suffix.lower() == ".csv":
            return EventFormat.CSV
        return EventFormat.JSONL


class SimulationConfig(BaseModel):
    """Define the schema of a simulation config file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    k_viral: float = Field(ge=0)
    r_retention: float = Field(ge=0, lt=1)
    market_size: int = Field(gt=0)
    horizon: int = Field(gt=0)
    initial_active: int = Field(default=0, ge=0)
    organic_per_period: int = Field(default=0, ge=0)
    paid_schedule: List[Tuple[int, int]] = Field(default_factory=list)

    def to_params(self) -> SimParams:
        """Return the simulator parameters this config describes."""
        schedule: dict[int, int] = {}
        for index, count in self.paid_schedule:
            schedule[index] = schedule.get(index, 0) + count
        return SimParams(
            k_viral=self.k_viral,
            r_retention=self.r_retention,
            market_size=self.market_size,
            horizon=self.horizon,
            initial_active=self.initial_active,
            organic_per_period=self.organic_per_period,
            paid_schedule=schedule,
        )


def parse_simulation_config(text: str) -> SimulationConfig:
    """Validate the text of a simulation config file."""
    try:
        raw = json.loads(text)
    except json.decoder.JSONDecodeError as err:
        raise ConfigError("<document>", f"not valid JSON ({err.msg})") from err
    if not isinstance(raw, dict):
        raise ConfigError("<document>", "expected a JSON object")

    try:
        return SimulationConfig.model_validate(raw)
    except ValidationError as err:
        first = err.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or "<document>"
        raise ConfigError(key, first["msg"]) from err


def load_simulation_config(
    path: str | Path,
) -> tuple[SimParams, SimulationConfig]:
    """Load a simulation config file and return its parameters."""
    config = parse_simulation_config(Path(path).read_text(encoding="utf-8"))
    params = config.to_params()
    _LOGGER.debug("Loaded simulation config from %s: %s", path, config)
    return params, config
