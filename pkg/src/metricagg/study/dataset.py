"""Joined method-level metrics, file-level aggregates and defect labels."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..aggregate import TECHNIQUES
from ..extract import METRICS, MethodMetrics
from ..matrix import MetricMatrix, aggregate_matrix

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class JoinStats:
    files_with_metrics: int
    files_with_defects: int
    matched: int
    metrics_only: int
    defects_only: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Dataset:
    name: str
    methods: MetricMatrix  # one row per method, METRICS columns
    method_files: tuple[str, ...]  # file of each method row
    files: MetricMatrix  # one row per file, 108 aggregated columns
    bugs: np.ndarray  # defect count per file row
    join: JoinStats | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def defective(self) -> np.ndarray:
        return (self.bugs > 0).astype(float)

    @property
    def n_files(self) -> int:
        return self.files.n_rows


def build_dataset(
    name: str,
    records: Sequence[MethodMetrics],
    bugs: Mapping[str, int],
) -> Dataset:
    """Inner join of method records with per-file defect counts.

    Files present on only one side are dropped and counted in ``join``.
    """
    metric_files = list(dict.fromkeys(r.file for r in records))
    matched = [f for f in metric_files if f in bugs]
    only_defects = sorted(set(bugs) - set(metric_files))
    stats = JoinStats(len(metric_files), len(bugs), len(matched), len(metric_files) - len(matched), len(only_defects))
    notes = []
    if stats.metrics_only:
        notes.append(f"{stats.metrics_only} file(s) with metrics but no defect record excluded")
    if stats.defects_only:
        notes.append(f"{stats.defects_only} defect record(s) without a matching file excluded")
    for n in notes:
        log.warning(n)
    if not matched:
        raise ValueError("join of metrics and defect data is empty")
    keep = set(matched)
    rows = [r for r in records if r.file in keep]
    methods = MetricMatrix.from_records(rows, METRICS, row_key=lambda r: f"{r.file}:{r.start_line}:{r.method}")
    groups = tuple(r.file for r in rows)
    files = aggregate_matrix(methods, groups, METRICS, TECHNIQUES)
    counts = np.array([bugs[f] for f in files.rows], dtype=float)
    return Dataset(name, methods, groups, files, counts, stats, notes)
