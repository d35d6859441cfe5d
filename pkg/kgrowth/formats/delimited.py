"""Define a reader for delimited (CSV) event logs."""
from __future__ import annotations

from collections.abc import Iterator
import csv
import io
from typing import Any

from kgrowth.errors import RULE_SYNTAX
from kgrowth.formats import FIELDS, EventReader


class CsvReader(EventReader):
    """Define a reader for comma-separated logs with a header row.

    Empty cells mean the field is absent.
    """

    def records(self, text: str) -> Iterator[tuple[int, dict[str, Any]]]:
        """Yield one record per data row."""
        reader = csv.DictReader(io.StringIO(text, newline=""))
        try:
            header = reader.fieldnames
        except csv.Error as err:
            self.report.add_error(1, RULE_SYNTAX, str(err))
            return
        if header is None:
            return

        missing = [name for name in FIELDS if name not in header]
        if missing:
            self.report.add_error(
                1, RULE_SYNTAX, f"header lacks column(s) {', '.join(missing)}"
            )
            return
        extra = [name for name in header if name not in FIELDS]
        self.flag_unknown_fields(1, extra)

        while True:
            try:
                row = next(reader)
            except StopIteration:
                return
            except csv.Error as err:
                self.report.add_error(reader.line_num, RULE_SYNTAX, str(err))
                return

            if None in row or any(value is None for value in row.values()):
                self.report.add_error(
                    reader.line_num, RULE_SYNTAX, "wrong number of cells"
                )
                continue
            yield reader.line_num, {
                name: value for name, value in row.items() if name in FIELDS and value
            }
