"""Labeled result grids rendered as CSV or aligned text."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field


def fmt(value) -> str:
    """C-locale, 6 significant digits; None and NaN become empty cells."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool,)):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    v = float(value)
    if math.isnan(v):
        return ""
    out = "%.6g" % v
    return "0" if out == "-0" else out


@dataclass
class RqTable:
    name: str
    header: list[str]
    rows: list[list] = field(default_factory=list)
    caption: str = ""

    def add(self, *cells) -> None:
        if len(cells) != len(self.header):
            raise ValueError(f"{self.name}: row has {len(cells)} cells, header has {len(self.header)}")
        self.rows.append(list(cells))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for r in self.rows:
            w.writerow([fmt(c) for c in r])
        return buf.getvalue()

    def to_text(self) -> str:
        cells = [self.header] + [[fmt(c) for c in r] for r in self.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(self.header))]
        lines = [self.caption] if self.caption else []
        for r in cells:
            lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
        return "\n".join(lines) + "\n"

    def cell(self, row_key: tuple, column: str):
        """Look a value up by the leading label cells of its row."""
        j = self.header.index(column)
        for r in self.rows:
            if tuple(r[: len(row_key)]) == tuple(row_key):
                return r[j]
        raise KeyError(row_key)
