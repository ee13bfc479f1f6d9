"""Tab-separated tables with a mandatory header row.

Columns are always addressed by name, never by position, so producers
may append columns freely. Values must not contain tabs or newlines;
floats are written with ``repr`` and therefore round-trip exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .errors import ValidationError


@dataclass
class Table:
    columns: list[str]
    rows: list[list[str]]
    source: str = "<memory>"

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise ValidationError(
                f"{self.source}: no column named {name!r}; available: {self.columns}"
            ) from None

    def column(self, name: str) -> list[str]:
        i = self.column_index(name)
        return [row[i] for row in self.rows]

    def float_column(self, name: str) -> list[float]:
        i = self.column_index(name)
        out = []
        for r, row in enumerate(self.rows):
            try:
                out.append(float(row[i]))
            except ValueError:
                raise ValidationError(
                    f"{self.source}: row {r}, column {name!r}: {row[i]!r} is not a number"
                ) from None
        return out

    def int_column(self, name: str) -> list[int]:
        i = self.column_index(name)
        out = []
        for r, row in enumerate(self.rows):
            try:
                out.append(int(row[i]))
            except ValueError:
                raise ValidationError(
                    f"{self.source}: row {r}, column {name!r}: {row[i]!r} is not an integer"
                ) from None
        return out

    def prefixed_columns(self, prefix: str) -> list[str]:
        """Column names starting with ``prefix``, in header order."""
        return [c for c in self.columns if c.startswith(prefix)]


def read_table(path: str) -> Table:
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f, delimiter="\t")
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: file is empty, expected a header row") from None
        rows = []
        for r, row in enumerate(reader):
            if len(row) != len(header):
                raise ValidationError(
                    f"{path}: row {r} has {len(row)} fields, header has {len(header)}"
                )
            rows.append(row)
    return Table(columns=header, rows=rows, source=path)


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_table(path: str, columns, rows) -> None:
    cols = [str(c) for c in columns]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\t".join(cols) + "\n")
        for row in rows:
            cells = [format_value(v) for v in row]
            for cell in cells:
                if "\t" in cell or "\n" in cell:
                    raise ValidationError(
                        f"{path}: value {cell!r} contains a tab or newline"
                    )
            if len(cells) != len(cols):
                raise ValidationError(
                    f"{path}: row has {len(cells)} fields, header has {len(cols)}"
                )
            f.write("\t".join(cells) + "\n")
