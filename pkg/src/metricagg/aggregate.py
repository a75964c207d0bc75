"""Lift method-level metric vectors to file-level values.

Nine techniques, listed in their fixed priority order (simplest first):
Sum, Avg, Med, SD, IQR, Skew, Kurt, Theil, Gini.

The dispersion, shape and inequality formulas divide by zero on degenerate
input.  Those cases return 0: a single value or a constant vector has
SD = IQR = Skew = Kurt = 0, and an all-zero vector has Theil = Gini = 0.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .extract import METRICS


class Technique(str, Enum):
    SUM = "sum"
    AVG = "avg"
    MED = "med"
    SD = "sd"
    IQR = "iqr"
    SKEW = "skew"
    KURT = "kurt"
    THEIL = "theil"
    GINI = "gini"

    @property
    def rank(self) -> int:
        return TECHNIQUES.index(self) + 1

    @property
    def label(self) -> str:
        return _LABELS[self]


TECHNIQUES: tuple[Technique, ...] = tuple(Technique)
_LABELS = {
    Technique.SUM: "Sum",
    Technique.AVG: "Avg",
    Technique.MED: "Med",
    Technique.SD: "SD",
    Technique.IQR: "IQR",
    Technique.SKEW: "Skew",
    Technique.KURT: "Kurt",
    Technique.THEIL: "Theil",
    Technique.GINI: "Gini",
}


class DomainError(ValueError):
    """Raised when an inequality measure receives a negative value."""


def quantile(x: Sequence[float], q: float) -> float:
    """Linear-interpolation quantile on the sorted copy, h = (N - 1) * q."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"quantile level must lie in [0, 1], got {q}")
    xs = sorted(x)
    if not xs:
        raise ValueError("quantile of an empty vector")
    h = (len(xs) - 1) * q
    lo = math.floor(h)
    if lo + 1 >= len(xs):
        return float(xs[lo])
    return float(xs[lo] + (h - lo) * (xs[lo + 1] - xs[lo]))


def _vector(x: Iterable[float]) -> np.ndarray:
    arr = np.asarray(list(x) if not isinstance(x, np.ndarray) else x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("aggregation needs a non-empty vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("aggregation input must be finite")
    return arr


def _moments(x: np.ndarray) -> tuple[float, float, float, float] | None:
    """Mean and centred power sums (2, 3, 4), or None for constant input."""
    if x.size < 2 or x.min() == x.max():
        return None
    mean = float(x.mean())
    dev = x - mean
    return mean, float(np.sum(dev**2)), float(np.sum(dev**3)), float(np.sum(dev**4))


def _nonnegative(x: np.ndarray, name: str) -> None:
    if np.any(x < 0):
        raise DomainError(f"{name} is undefined for negative values")


def aggregate(x: Iterable[float], technique: Technique | str) -> float:
    t = Technique(technique)
    v = _vector(x)
    n = v.size
    if t is Technique.SUM:
        return float(math.fsum(v))
    if t is Technique.AVG:
        return float(math.fsum(v) / n)
    if t is Technique.MED:
        return quantile(v, 0.5)
    if t is Technique.IQR:
        return quantile(v, 0.75) - quantile(v, 0.25)
    if t is Technique.THEIL:
        _nonnegative(v, "Theil index")
        mean = math.fsum(v) / n
        if mean == 0 or v.min() == v.max():
            return 0.0
        r = v / mean
        pos = r > 0
        return float(np.sum(r[pos] * np.log(r[pos])) / n)
    if t is Technique.GINI:
        _nonnegative(v, "Gini coefficient")
        total = math.fsum(v)
        if total == 0 or v.min() == v.max():
            return 0.0
        xs = np.sort(v)
        i = np.arange(1, n + 1)
        return float(2 * np.sum(i * xs) / (n * total) - (n + 1) / n)
    m = _moments(v)
    if m is None:
        return 0.0
    _, s2, s3, s4 = m
    var = s2 / (n - 1)
    if t is Technique.SD:
        return math.sqrt(var)
    if t is Technique.SKEW:
        return (s3 / n) / var**1.5
    if t is Technique.KURT:
        return (s4 / n) / var**2 - 3
    raise AssertionError(t)


def column_name(metric: str, technique: Technique | str) -> str:
    return f"{metric}.{Technique(technique).value}"


def file_columns(metrics: Sequence[str] = METRICS, techniques: Sequence[Technique] = TECHNIQUES) -> list[str]:
    """Column names in metric order, then technique priority order."""
    return [column_name(m, t) for m in metrics for t in techniques]


def aggregate_vectors(
    vectors: dict[str, Sequence[float]],
    metrics: Sequence[str] = METRICS,
    techniques: Sequence[Technique] = TECHNIQUES,
) -> dict[str, float]:
    """Aggregate each metric vector of one file with every technique."""
    return {column_name(m, t): aggregate(vectors[m], t) for m in metrics for t in techniques}


def aggregate_file(methods: Sequence, techniques: Sequence[Technique] = TECHNIQUES) -> dict[str, float]:
    """108 named file-level values from the file's method records."""
    if not methods:
        raise ValueError("file has no methods")
    vectors = {m: [getattr(rec, m) for rec in methods] for m in METRICS}
    return aggregate_vectors(vectors, METRICS, techniques)
