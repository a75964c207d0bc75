"""Repeated k-fold cross-validation of linear and logistic defect models."""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..stats import EvaluationError, FitError, auc, fit_linear, fit_logistic, mse


@dataclass(frozen=True)
class CvPlan:
    seed: int
    k: int = 10
    repetitions: int = 10
    stratified: bool = True

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")


def _key_int(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "little")


def repetition_rng(seed: int, dataset: str, kind: str, repetition: int) -> np.random.Generator:
    """Generator keyed by (seed, dataset, kind, repetition).

    Models compared on the same dataset and kind see the same partitions,
    whatever order configurations are evaluated in.
    """
    ss = np.random.SeedSequence([seed, _key_int(dataset), _key_int(kind), repetition])
    return np.random.default_rng(ss)


def fold_ids(n: int, k: int, rng: np.random.Generator, labels: np.ndarray | None = None) -> np.ndarray:
    """Fold index per row; sizes differ by at most one.

    With ``labels``, each class is shuffled separately and the classes are
    dealt out in turn, so every fold gets a near-equal share of each class.
    """
    if n < k:
        raise ValueError(f"cannot split {n} rows into {k} folds")
    if labels is None:
        order = rng.permutation(n)
    else:
        labels = np.asarray(labels)
        pos = np.flatnonzero(labels == 1)
        neg = np.flatnonzero(labels != 1)
        order = np.concatenate([rng.permutation(pos), rng.permutation(neg)])
    folds = np.empty(n, dtype=int)
    folds[order] = np.arange(n) % k
    return folds


@dataclass
class EvalOutcome:
    label: str
    filtering: str
    kind: str  # "linear" (MSE) or "logistic" (AUC)
    predictors: tuple[str, ...]
    values: np.ndarray  # repetitions x k, NaN where a fold was skipped
    skipped: list[tuple[int, int, str]] = field(default_factory=list)
    nonconverged: int = 0

    @property
    def fold_values(self) -> np.ndarray:
        v = self.values.ravel()
        return v[~np.isnan(v)]

    @property
    def mean(self) -> float:
        v = self.fold_values
        return float(v.mean()) if v.size else math.nan


def repeated_cv(
    X: np.ndarray,
    y: np.ndarray,
    kind: str,
    plan: CvPlan,
    dataset: str = "dataset",
    label: str = "",
    filtering: str = "",
    predictors: Sequence[str] = (),
) -> EvalOutcome:
    """Train on k-1 folds, score the held-out fold, for every repetition.

    Linear models are scored by MSE against ``y``; logistic models by AUC
    against ``y > 0``.  Folds that cannot be scored (single class, failed
    fit) are recorded in ``skipped`` and left as NaN.
    """
    if kind not in ("linear", "logistic"):
        raise ValueError(f"unknown model kind {kind!r}")
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    n = y.size
    target = y if kind == "linear" else (y > 0).astype(float)
    values = np.full((plan.repetitions, plan.k), np.nan)
    skipped: list[tuple[int, int, str]] = []
    nonconverged = 0
    for r in range(plan.repetitions):
        rng = repetition_rng(plan.seed, dataset, kind, r)
        strat = target if (kind == "logistic" and plan.stratified) else None
        folds = fold_ids(n, plan.k, rng, strat)
        for f in range(plan.k):
            test = folds == f
            train = ~test
            try:
                if kind == "linear":
                    model = fit_linear(X[train], target[train])
                    values[r, f] = mse(model.predict(X[test]), target[test])
                else:
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore", RuntimeWarning)
                        model = fit_logistic(X[train], target[train])
                    nonconverged += not model.converged
                    values[r, f] = auc(model.predict(X[test]), target[test])
            except (FitError, EvaluationError) as exc:
                skipped.append((r, f, str(exc)))
    return EvalOutcome(label, filtering, kind, tuple(predictors), values, skipped, nonconverged)
