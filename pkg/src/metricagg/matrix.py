"""Named-column numeric table shared by every pipeline stage."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .aggregate import TECHNIQUES, Technique, aggregate, column_name


@dataclass(frozen=True)
class MetricMatrix:
    columns: tuple[str, ...]
    values: np.ndarray  # shape (len(rows), len(columns))
    rows: tuple[str, ...] = ()

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2:
            vals = vals.reshape(len(self.rows) if self.rows else 0, len(self.columns))
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "columns", tuple(self.columns))
        rows = tuple(self.rows) if self.rows else tuple(str(i) for i in range(vals.shape[0]))
        object.__setattr__(self, "rows", rows)
        if vals.shape != (len(rows), len(self.columns)):
            raise ValueError(f"values shape {vals.shape} does not match {len(rows)} rows x {len(self.columns)} columns")
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate column names")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise KeyError(f"no column {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.index(name)]

    def select(self, names: Sequence[str]) -> "MetricMatrix":
        idx = [self.index(n) for n in names]
        return MetricMatrix(tuple(names), self.values[:, idx], self.rows)

    def take(self, rows: Sequence[int]) -> "MetricMatrix":
        rows = list(rows)
        return MetricMatrix(self.columns, self.values[rows], tuple(self.rows[i] for i in rows))

    @classmethod
    def from_records(cls, records: Sequence, columns: Sequence[str], row_key=None) -> "MetricMatrix":
        vals = np.array([[float(getattr(r, c)) for c in columns] for r in records], dtype=float)
        vals = vals.reshape(len(records), len(columns))
        rows = tuple(row_key(r) for r in records) if row_key else ()
        return cls(tuple(columns), vals, rows)


def group_rows(groups: Sequence[str]) -> dict[str, list[int]]:
    """Row indices per group, groups in order of first appearance."""
    out: dict[str, list[int]] = {}
    for i, g in enumerate(groups):
        out.setdefault(g, []).append(i)
    return out


def aggregate_matrix(
    methods: MetricMatrix,
    groups: Sequence[str],
    metrics: Sequence[str] | None = None,
    techniques: Sequence[Technique] = TECHNIQUES,
) -> MetricMatrix:
    """Aggregate method rows to one row per group (file)."""
    if len(groups) != methods.n_rows:
        raise ValueError("one group label per method row required")
    metrics = list(metrics) if metrics is not None else list(methods.columns)
    idx = [methods.index(m) for m in metrics]
    by_group = group_rows(groups)
    cols = tuple(column_name(m, t) for m in metrics for t in techniques)
    out = np.empty((len(by_group), len(cols)))
    for r, rows in enumerate(by_group.values()):
        block = methods.values[rows]
        out[r] = [aggregate(block[:, j], t) for j in idx for t in techniques]
    return MetricMatrix(cols, out, tuple(by_group))
