"""Initialize."""
from .ingest import bucketize, build_registry, parse_events, read_aggregates  # noqa
from .metrics import compute_series  # noqa
from .simulator import SimParams, launch_gate, run  # noqa
