"""Study orchestration and the report bundle."""

from __future__ import annotations

import json
import platform
from importlib import metadata
from typing import Sequence

import numpy as np
import scipy

from ..extract import METRICS
from ..io import sha256_bytes
from .dataset import Dataset, build_dataset
from .rq import (
    MODEL_LABELS,
    StudyConfig,
    correlation_increase,
    redundancy_table,
    rq3_tables,
    run_rq3,
)
from .tables import RqTable

ANALYSES = ("rq1", "rq2", "rq3")


def _version(dist: str) -> str:
    try:
        return metadata.version(dist)
    except metadata.PackageNotFoundError:
        return "unknown"


def versions() -> dict[str, str]:
    return {
        "artifact": _version("artifact"),
        "numpy": np.__version__,
        "python": platform.python_version(),
        "scipy": scipy.__version__,
    }


def run_tables(d: Dataset, cfg: StudyConfig, which: Sequence[str] = ANALYSES) -> list[RqTable]:
    tables: list[RqTable] = []
    if "rq1" in which:
        tables.append(correlation_increase(d))
    if "rq2" in which:
        tables.extend(redundancy_table(d, m, cfg.cluster_threshold) for m in METRICS)
    if "rq3" in which:
        tables.extend(rq3_tables(run_rq3(d, cfg, MODEL_LABELS)).values())
    return tables


def manifest(
    d: Dataset,
    cfg: StudyConfig,
    which: Sequence[str],
    inputs: Sequence[tuple[str, str]],
    reports: dict[str, str],
) -> str:
    """Run manifest as JSON text.  No timestamps, keys sorted."""
    doc = {
        "analyses": list(which),
        "cv": {"k": cfg.k, "repetitions": cfg.repetitions, "stratified": cfg.stratified},
        "dataset": {"name": d.name, "files": d.n_files, "methods": d.methods.n_rows},
        "inputs": [{"path": p, "sha256": h} for p, h in inputs],
        "join": d.join.as_dict() if d.join else None,
        "log1p_response": cfg.log1p_response,
        "notes": list(d.notes),
        "reports": {name: sha256_bytes(text.encode("utf-8")) for name, text in sorted(reports.items())},
        "seed": cfg.seed,
        "thresholds": {"cluster": cfg.cluster_threshold, "redundancy": cfg.redundancy_cutoff},
        "versions": versions(),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def run_bundle(
    d: Dataset,
    cfg: StudyConfig,
    which: Sequence[str] = ANALYSES,
    inputs: Sequence[tuple[str, str]] = (),
) -> tuple[dict[str, str], list[RqTable]]:
    """Report bundle contents (file name -> text) and the tables behind them."""
    tables = run_tables(d, cfg, which)
    files = {f"{t.name}.csv": t.to_csv() for t in tables}
    files["run_manifest.json"] = manifest(d, cfg, which, inputs, files)
    return files, tables


__all__ = [
    "ANALYSES",
    "Dataset",
    "StudyConfig",
    "build_dataset",
    "manifest",
    "run_bundle",
    "run_tables",
]
