"""The three analyses: correlation inflation, redundancy, model comparison."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..aggregate import TECHNIQUES, Technique, column_name
from ..extract import METRICS
from ..filtering import (
    CLUSTER_THRESHOLD,
    REDUNDANCY_CUTOFF,
    FilterReport,
    filter_matrix,
    redundancy_scores,
    select_representatives,
    two_level_filter,
    varclus,
)
from ..stats import StatsWarning, cliffs_delta, mann_whitney_u, spearman_or_none
from .cv import CvPlan, EvalOutcome, repeated_cv
from .dataset import Dataset
from .tables import RqTable

MODEL_LABELS = ("all",) + tuple(t.value for t in TECHNIQUES)
FILTERINGS = ("F1", "F2")
KINDS = ("linear", "logistic")


@dataclass(frozen=True)
class StudyConfig:
    seed: int
    k: int = 10
    repetitions: int = 10
    stratified: bool = True
    cluster_threshold: float = CLUSTER_THRESHOLD
    redundancy_cutoff: float = REDUNDANCY_CUTOFF
    log1p_response: bool = False

    def __post_init__(self):
        for name in ("cluster_threshold", "redundancy_cutoff"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")

    @property
    def plan(self) -> CvPlan:
        return CvPlan(self.seed, self.k, self.repetitions, self.stratified)


# -- correlation inflation ---------------------------------------------------------


def correlation_increase(d: Dataset) -> RqTable:
    """|rho| with LOC after aggregation minus |rho| before, per metric and technique.

    Two rows per metric: ``relative`` = (rho_f - rho_m) / rho_m and
    ``absolute`` = rho_f - rho_m.  Undefined correlations leave empty cells.
    """
    if d.methods.n_rows < 3 or d.n_files < 3:
        raise ValueError("correlation analysis needs at least 3 methods and 3 files")
    table = RqTable("rq1", ["metric", "measure"] + [t.value for t in TECHNIQUES])
    table.caption = "Change in |Spearman rho| with LOC after aggregation"
    loc = d.methods.column("loc")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StatsWarning)
        for m in METRICS[1:]:
            rho_m = spearman_or_none(loc, d.methods.column(m))
            rel, ab = [], []
            for t in TECHNIQUES:
                rho_f = spearman_or_none(d.files.column(column_name("loc", t)), d.files.column(column_name(m, t)))
                if rho_m is None or rho_f is None:
                    rel.append(None)
                    ab.append(None)
                    continue
                delta = abs(rho_f) - abs(rho_m)
                ab.append(delta)
                rel.append(delta / abs(rho_m) if rho_m != 0 else None)
            table.add(m, "relative", *rel)
            table.add(m, "absolute", *ab)
    return table


# -- redundancy --------------------------------------------------------------------


@dataclass(frozen=True)
class RedundancyMeasure:
    technique: str
    measure: float
    status: str  # "retained" or "discarded"


def redundancy_measures(d: Dataset, metric: str, cluster_threshold: float = CLUSTER_THRESHOLD) -> list[RedundancyMeasure]:
    """Redundancy in [0, 1] of each aggregation of ``metric``.

    Aggregations merged into a correlation cluster score 1.  Each survivor
    scores the adjusted R^2 of predicting it from the other survivors,
    clipped to [0, 1]; a lone survivor scores 0.
    """
    if d.n_files < 3:
        raise ValueError("redundancy analysis needs at least 3 files")
    cols = [column_name(metric, t) for t in TECHNIQUES]
    sub = d.files.select(cols)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StatsWarning)
        report = select_representatives(varclus(sub), cluster_threshold)
    survivors = report.retained
    if len(survivors) > 1:
        scores = redundancy_scores(sub.select(survivors))
    else:
        scores = {v: 0.0 for v in survivors}
    out = []
    for c, t in zip(cols, TECHNIQUES):
        if c in scores:
            out.append(RedundancyMeasure(t.value, min(1.0, max(0.0, scores[c])), "retained"))
        else:
            out.append(RedundancyMeasure(t.value, 1.0, "discarded"))
    return out


def redundancy_table(d: Dataset, metric: str, cluster_threshold: float = CLUSTER_THRESHOLD) -> RqTable:
    table = RqTable(f"rq2_{metric}", ["technique", "measure", "status"])
    table.caption = f"Redundancy of the aggregations of {metric}"
    for r in redundancy_measures(d, metric, cluster_threshold):
        table.add(r.technique, r.measure, r.status)
    return table


# -- model comparison --------------------------------------------------------------


def select_predictors(
    d: Dataset,
    cfg: StudyConfig,
    level1: FilterReport | None = None,
) -> dict[tuple[str, str], FilterReport]:
    """Filter reports for every (filtering, model label) pair.

    F1 filters the file-level columns of each model directly.  F2 filters
    the method-level metrics once (shared by all labels), aggregates the
    survivors with the model's techniques and filters again.
    """
    ct, rc = cfg.cluster_threshold, cfg.redundancy_cutoff
    if level1 is None:
        level1 = filter_matrix(d.methods, ct, rc)
    out: dict[tuple[str, str], FilterReport] = {}
    for label in MODEL_LABELS:
        techs = TECHNIQUES if label == "all" else (Technique(label),)
        cols = [column_name(m, t) for m in METRICS for t in techs]
        out[("F1", label)] = filter_matrix(d.files.select(cols), ct, rc)
        out[("F2", label)] = two_level_filter(d.methods, d.method_files, ct, rc, techs, level1=level1)
    return out


@dataclass
class Rq3Result:
    dataset: str
    reports: dict[tuple[str, str], FilterReport]
    outcomes: dict[tuple[str, str, str], EvalOutcome] = field(default_factory=dict)

    def outcome(self, filtering: str, label: str, kind: str) -> EvalOutcome:
        return self.outcomes[(filtering, label, kind)]


def run_rq3(d: Dataset, cfg: StudyConfig, labels: Sequence[str] = MODEL_LABELS) -> Rq3Result:
    reports = select_predictors(d, cfg)
    result = Rq3Result(d.name, reports)
    y_lin = np.log1p(d.bugs) if cfg.log1p_response else d.bugs
    for filtering in FILTERINGS:
        for label in labels:
            preds = reports[(filtering, label)].retained
            X = d.files.select(preds).values
            for kind in KINDS:
                y = y_lin if kind == "linear" else d.bugs
                result.outcomes[(filtering, label, kind)] = repeated_cv(
                    X, y, kind, cfg.plan, d.name, label, filtering, preds
                )
    return result


def rq3_tables(result: Rq3Result, labels: Sequence[str] = MODEL_LABELS) -> dict[str, RqTable]:
    tables = {}
    for kind, name, what in (("linear", "rq3_mse", "MSE"), ("logistic", "rq3_auc", "AUC")):
        t = RqTable(name, ["dataset", "filtering"] + list(labels))
        t.caption = f"Mean {what} over all cross-validation folds"
        for f in FILTERINGS:
            t.add(result.dataset, f, *[result.outcome(f, lab, kind).mean for lab in labels])
        tables[name] = t
    stats = RqTable("rq3_stats", ["dataset", "kind", "filtering", "p_value", "abs_d", "magnitude"])
    stats.caption = "All versus Sum: Mann-Whitney U p-value and Cliff's |d|"
    if "all" in labels and "sum" in labels:
        for kind in KINDS:
            for f in FILTERINGS:
                a = result.outcome(f, "all", kind).fold_values
                s = result.outcome(f, "sum", kind).fold_values
                if a.size == 0 or s.size == 0:
                    stats.add(result.dataset, kind, f, None, None, "")
                    continue
                mw = mann_whitney_u(a, s)
                es = cliffs_delta(a, s)
                stats.add(result.dataset, kind, f, mw.p, abs(es.cliffs_d), es.magnitude)
    tables["rq3_stats"] = stats
    counts = RqTable("retained_counts", ["model", "columns", "F1", "F2"])
    counts.caption = "Number of predictors retained by each filtering approach"
    for lab in labels:
        counts.add(
            lab,
            len(result.reports[("F1", lab)].inputs),
            len(result.reports[("F1", lab)].retained),
            len(result.reports[("F2", lab)].retained),
        )
    tables["retained_counts"] = counts
    return tables

