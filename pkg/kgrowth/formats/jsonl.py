"""Define a reader for JSON Lines event logs."""
from __future__ import annotations

from collections.abc import Iterator
import json
from typing import Any

from kgrowth.errors import RULE_SYNTAX
from kgrowth.formats import EventReader


class JsonLinesReader(EventReader):
    """Define a reader for one JSON object per line."""

    def records(self, text: str) -> Iterator[tuple[int, dict[str, Any]]]:
        """Yield one record per non-blank line."""
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.decoder.JSONDecodeError as err:
                self.report.add_error(line_no, RULE_SYNTAX, err.msg)
                continue
            if not isinstance(record, dict):
                self.report.add_error(line_no, RULE_SYNTAX, "expected a JSON object")
                continue
            yield line_no, record
