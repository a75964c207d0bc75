"""Predictor filtering: correlation clustering, then redundancy elimination.

Variables are clustered by average linkage on the distance 1 - |rho|
(Spearman).  Every cluster formed at |rho| above the cut threshold keeps a
single representative, the one that comes first in technique priority order
and then metric order.  Survivors then go through iterative redundancy
elimination: the variable best explained (adjusted R^2) by the others is
dropped while that R^2 reaches the cutoff.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .aggregate import TECHNIQUES, Technique
from .extract import METRICS
from .matrix import MetricMatrix, aggregate_matrix
from .stats import FitError, StatsWarning, adjusted_r2, fit_linear, rankdata

CLUSTER_THRESHOLD = 0.7
REDUNDANCY_CUTOFF = 0.9
TIE_EPS = 1e-9

_TECH_RANK = {t.value: i + 1 for i, t in enumerate(TECHNIQUES)}
_METRIC_RANK = {m: i for i, m in enumerate(METRICS)}


def priority_key(name: str) -> tuple:
    """Ordering key: technique priority, then metric order, then name.

    Plain metric names (method-level columns) rank as technique 0.
    """
    metric, _, tech = name.partition(".")
    return (_TECH_RANK.get(tech, 0 if not tech else 99), _METRIC_RANK.get(metric, 99), name)


@dataclass(frozen=True)
class Discard:
    var: str
    phase: str  # "cluster" or "redundancy"
    value: float

    def as_dict(self) -> dict:
        return {"var": self.var, "phase": self.phase, "value": self.value}


@dataclass
class FilterReport:
    inputs: tuple[str, ...]
    retained: list[str]
    discarded: list[Discard] = field(default_factory=list)
    levels: list["FilterReport"] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        out = {"retained": list(self.retained), "discarded": [d.as_dict() for d in self.discarded]}
        if self.levels:
            out["levels"] = [lv.as_dict() for lv in self.levels]
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def table(self) -> str:
        lines = [f"{'variable':<16} {'status':<10} {'phase':<11} value"]
        for v in self.retained:
            lines.append(f"{v:<16} {'retained':<10} {'':<11}")
        for d in self.discarded:
            lines.append(f"{d.var:<16} {'discarded':<10} {d.phase:<11} {d.value:.6g}")
        return "\n".join(lines) + "\n"


# -- clustering ------------------------------------------------------------------


def abs_spearman_matrix(values: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """|rho| for every column pair, plus the indices of constant columns."""
    ranks = np.column_stack([rankdata(values[:, j]) for j in range(values.shape[1])])
    centred = ranks - ranks.mean(axis=0)
    norms = np.sqrt(np.sum(centred**2, axis=0))
    constant = [j for j in range(values.shape[1]) if norms[j] == 0]
    safe = np.where(norms == 0, 1.0, norms)
    unit = centred / safe
    rho = np.clip(np.abs(unit.T @ unit), 0.0, 1.0)
    rho[constant, :] = 0.0
    rho[:, constant] = 0.0
    np.fill_diagonal(rho, 1.0)
    return rho, constant


@dataclass
class ClusterTree:
    variables: tuple[str, ...]
    merges: list[tuple[int, int, float, int]]  # (cluster a, cluster b, height, size), scipy-style ids
    similarity: np.ndarray  # |rho| between variables
    isolated: tuple[str, ...] = ()

    def members(self) -> dict[int, list[int]]:
        out = {i: [i] for i in range(len(self.variables))}
        for k, (a, b, _, _) in enumerate(self.merges):
            out[len(self.variables) + k] = out[a] + out[b]
        return out

    def cut(self, threshold: float = CLUSTER_THRESHOLD) -> list[list[str]]:
        """Clusters joined at mean |rho| strictly above ``threshold``."""
        n = len(self.variables)
        parent = list(range(n))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        members = self.members()
        for a, b, height, _ in self.merges:
            if 1.0 - height > threshold:
                ra, rb = find(members[a][0]), find(members[b][0])
                parent[max(ra, rb)] = min(ra, rb)
        groups: dict[int, list[str]] = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(self.variables[i])
        return list(groups.values())


def varclus(matrix: MetricMatrix) -> ClusterTree:
    """Average-linkage agglomerative clustering on 1 - |Spearman rho|.

    Constant columns have no defined correlation; they are kept out of
    every merge (isolated) and reported with a warning.
    """
    p = len(matrix.columns)
    if p < 1:
        raise ValueError("varclus needs at least one variable")
    rho, constant = abs_spearman_matrix(matrix.values)
    if constant:
        names = ", ".join(matrix.columns[j] for j in constant)
        warnings.warn(f"constant columns isolated from clustering: {names}", StatsWarning, stacklevel=2)
    active = {i: [i] for i in range(p) if i not in constant}
    # mean |rho| between active clusters
    sim = {(i, j): rho[i, j] for i in active for j in active if i < j}
    merges: list[tuple[int, int, float, int]] = []
    next_id = p
    while len(active) > 1:
        (a, b), s = max(sim.items(), key=lambda kv: (kv[1], -kv[0][0], -kv[0][1]))
        na, nb = len(active[a]), len(active[b])
        merges.append((a, b, 1.0 - s, na + nb))
        new = next_id
        next_id += 1
        members = active.pop(a) + active.pop(b)
        for c in active:
            s_ac = sim.pop((min(a, c), max(a, c)))
            s_bc = sim.pop((min(b, c), max(b, c)))
            sim[(c, new)] = (na * s_ac + nb * s_bc) / (na + nb)
        del sim[(a, b)]
        active[new] = members
    # Constant columns join last at height 1 so the tree still spans every leaf.
    size = {c: len(m) for c, m in active.items()}
    size.update({j: 1 for j in constant})
    roots = list(active) + list(constant)
    while len(roots) > 1:
        a, b = roots[0], roots[1]
        size[next_id] = size[a] + size[b]
        merges.append((a, b, 1.0, size[next_id]))
        roots = [next_id] + roots[2:]
        next_id += 1
    return ClusterTree(tuple(matrix.columns), merges, rho, tuple(matrix.columns[j] for j in constant))


def select_representatives(tree: ClusterTree, threshold: float = CLUSTER_THRESHOLD) -> FilterReport:
    retained: list[str] = []
    discarded: list[Discard] = []
    index = {v: i for i, v in enumerate(tree.variables)}
    for cluster in tree.cut(threshold):
        keep = min(cluster, key=priority_key)
        retained.append(keep)
        for v in sorted(cluster, key=priority_key):
            if v != keep:
                discarded.append(Discard(v, "cluster", float(tree.similarity[index[v], index[keep]])))
    order = {v: i for i, v in enumerate(tree.variables)}
    retained.sort(key=order.__getitem__)
    discarded.sort(key=lambda d: order[d.var])
    notes = [f"constant column isolated: {v}" for v in tree.isolated]
    return FilterReport(tree.variables, retained, discarded, notes=notes)


# -- redundancy ------------------------------------------------------------------


def _adjusted_r2_of(values: np.ndarray, j: int) -> float:
    y = values[:, j]
    X = np.delete(values, j, axis=1)
    try:
        model = fit_linear(X, y)
        return adjusted_r2(X, y, model)
    except FitError:
        return 1.0


def redundancy_scores(matrix: MetricMatrix) -> dict[str, float]:
    """Adjusted R^2 of each column regressed on all the others."""
    if len(matrix.columns) < 2:
        return {c: 0.0 for c in matrix.columns}
    return {c: _adjusted_r2_of(matrix.values, j) for j, c in enumerate(matrix.columns)}


def redun_eliminate(matrix: MetricMatrix, cutoff: float = REDUNDANCY_CUTOFF) -> FilterReport:
    """Drop the most predictable variable until every adjusted R^2 < cutoff.

    Scores within ``TIE_EPS`` of the maximum tie; among tied variables the
    one last in priority order goes first.
    """
    names = list(matrix.columns)
    current = matrix
    discarded: list[Discard] = []
    while len(names) > 1:
        scores = redundancy_scores(current)
        top = max(scores.values())
        if top < cutoff:
            break
        tied = [v for v in names if scores[v] >= top - TIE_EPS]
        victim = max(tied, key=priority_key)
        discarded.append(Discard(victim, "redundancy", float(scores[victim])))
        names.remove(victim)
        current = current.select(names)
    return FilterReport(tuple(matrix.columns), names, discarded)


def filter_matrix(
    matrix: MetricMatrix,
    cluster_threshold: float = CLUSTER_THRESHOLD,
    redundancy_cutoff: float = REDUNDANCY_CUTOFF,
) -> FilterReport:
    """Clustering phase followed by redundancy phase on the survivors."""
    if len(matrix.columns) < 2:
        return FilterReport(tuple(matrix.columns), list(matrix.columns))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StatsWarning)
        tree = varclus(matrix)
    first = select_representatives(tree, cluster_threshold)
    second = redun_eliminate(matrix.select(first.retained), redundancy_cutoff)
    return FilterReport(
        tuple(matrix.columns),
        second.retained,
        first.discarded + second.discarded,
        notes=first.notes,
    )


def one_level_filter(
    file_matrix: MetricMatrix,
    cluster_threshold: float = CLUSTER_THRESHOLD,
    redundancy_cutoff: float = REDUNDANCY_CUTOFF,
) -> FilterReport:
    return filter_matrix(file_matrix, cluster_threshold, redundancy_cutoff)


def two_level_filter(
    method_matrix: MetricMatrix,
    groups: Sequence[str],
    cluster_threshold: float = CLUSTER_THRESHOLD,
    redundancy_cutoff: float = REDUNDANCY_CUTOFF,
    techniques: Sequence[Technique] = TECHNIQUES,
    level1: FilterReport | None = None,
) -> FilterReport:
    """Filter method-level metrics, aggregate the survivors, filter again.

    ``level1`` lets callers reuse an existing method-level report (several
    technique-specific runs share it).
    """
    if level1 is None:
        level1 = filter_matrix(method_matrix, cluster_threshold, redundancy_cutoff)
    files = aggregate_matrix(method_matrix, groups, level1.retained, techniques)
    level2 = filter_matrix(files, cluster_threshold, redundancy_cutoff)
    return FilterReport(
        tuple(level1.inputs),
        level2.retained,
        level1.discarded + level2.discarded,
        levels=[level1, level2],
        notes=level1.notes + level2.notes,
    )
