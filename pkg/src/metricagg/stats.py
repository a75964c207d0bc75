"""Statistical kernel: ranks, regression fits, model scores and group tests."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import expit


class StatsWarning(UserWarning):
    pass


class FitError(ValueError):
    pass


class PredictionError(KeyError):
    pass


class EvaluationError(ValueError):
    pass


def _pair(x: Sequence[float], y: Sequence[float], min_len: int = 1) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.ndim != 1 or b.ndim != 1 or a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < min_len:
        raise ValueError(f"need at least {min_len} values, got {a.size}")
    return a, b


def rankdata(x: Sequence[float]) -> np.ndarray:
    """1-based mid-ranks (ties share the average of their positions)."""
    a = np.asarray(x, dtype=float)
    order = np.argsort(a, kind="mergesort")
    s = a[order]
    ranks = np.empty(a.size)
    i = 0
    while i < a.size:
        j = i
        while j + 1 < a.size and s[j + 1] == s[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _pearson(a: np.ndarray, b: np.ndarray) -> float | None:
    da = a - a.mean()
    db = b - b.mean()
    sa = float(np.dot(da, da))
    sb = float(np.dot(db, db))
    if sa == 0 or sb == 0:
        return None
    r = float(np.dot(da, db)) / math.sqrt(sa * sb)
    return max(-1.0, min(1.0, r))


def spearman_or_none(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Spearman's rho, or None when either rank vector is constant."""
    a, b = _pair(x, y, 2)
    return _pearson(rankdata(a), rankdata(b))


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    rho = spearman_or_none(x, y)
    if rho is None:
        warnings.warn("spearman: constant input, rho taken as 0", StatsWarning, stacklevel=2)
        return 0.0
    return rho


# -- regression ----------------------------------------------------------------


@dataclass
class FittedModel:
    kind: str  # "linear" or "logistic"
    names: tuple[str, ...]
    intercept: float
    coef: np.ndarray  # one per name; dropped columns hold 0
    converged: bool = True
    iterations: int = 0
    dropped: tuple[str, ...] = ()
    notes: list[str] = field(default_factory=list)

    @property
    def n_retained(self) -> int:
        return len(self.names) - len(self.dropped)

    def eta(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != len(self.names):
            raise PredictionError(f"expected {len(self.names)} predictors, got {X.shape[1]}")
        return self.intercept + X @ self.coef

    def predict(self, X: np.ndarray) -> np.ndarray:
        eta = self.eta(X)
        return eta if self.kind == "linear" else expit(eta)


def _names(p: int, names: Sequence[str] | None) -> tuple[str, ...]:
    if names is None:
        return tuple(f"x{i + 1}" for i in range(p))
    names = tuple(names)
    if len(names) != p:
        raise ValueError("one name per column required")
    if len(set(names)) != p:
        raise ValueError("column names must be unique")
    return names


def _design(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size:
        raise FitError(f"design shape {X.shape} does not match response length {y.size}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise FitError("design matrix contains NaN or Inf")
    return X, y


def independent_columns(X: np.ndarray, tol: float = 1e-9) -> list[int]:
    """Greedy left-to-right column selection by modified Gram-Schmidt.

    The intercept is orthogonalised out first.  A column is kept when the part
    not explained by the intercept and the columns already kept has norm above
    ``tol`` relative to its centred norm.
    """
    n = X.shape[0]
    basis = [np.full(n, 1 / math.sqrt(n))]
    keep: list[int] = []
    for j in range(X.shape[1]):
        v = X[:, j].astype(float).copy()
        ref = np.linalg.norm(v - v.mean())
        if ref == 0:
            continue
        for q in basis:
            v -= np.dot(q, v) * q
        for q in basis:  # second pass for stability
            v -= np.dot(q, v) * q
        norm = np.linalg.norm(v)
        if norm > tol * ref and norm > 1e-12 * max(1.0, np.abs(X[:, j]).max()):
            basis.append(v / norm)
            keep.append(j)
    return keep


def fit_linear(X, y, names: Sequence[str] | None = None) -> FittedModel:
    """Ordinary least squares with intercept, solved through a QR factorisation.

    Collinear columns are dropped greedily, later columns first to go, and
    recorded in ``dropped`` with coefficient 0.
    """
    X, y = _design(X, y)
    n, p = X.shape
    names = _names(p, names)
    if n < 1:
        raise FitError("no rows to fit")
    keep = independent_columns(X)
    if n < len(keep) + 1:
        raise FitError(f"{n} rows cannot fit {len(keep)} predictors plus intercept")
    A = np.column_stack([np.ones(n), X[:, keep]])
    Q, R = np.linalg.qr(A)
    beta = solve_triangular(R, Q.T @ y)
    coef = np.zeros(p)
    coef[keep] = beta[1:]
    dropped = tuple(names[j] for j in range(p) if j not in keep)
    notes = [f"dropped collinear column {d}" for d in dropped]
    return FittedModel("linear", names, float(beta[0]), coef, True, 0, dropped, notes)


def _row_vector(model: FittedModel, row) -> np.ndarray:
    if isinstance(row, Mapping):
        missing = [n for n in model.names if n not in row]
        if missing:
            raise PredictionError(f"missing predictors: {', '.join(missing)}")
        return np.array([float(row[n]) for n in model.names])
    vec = np.asarray(row, dtype=float).ravel()
    if vec.size != len(model.names):
        raise PredictionError(f"expected {len(model.names)} predictors, got {vec.size}")
    return vec


def predict_linear(model: FittedModel, row) -> float:
    return float(model.intercept + _row_vector(model, row) @ model.coef)


def predict_logistic(model: FittedModel, row) -> float:
    return float(expit(model.intercept + _row_vector(model, row) @ model.coef))


def classify(probability: float) -> bool:
    """Defective when the predicted probability is strictly above 0.5."""
    return probability > 0.5


def _loglik(eta: np.ndarray, y: np.ndarray) -> float:
    # log p = -log(1 + e^-eta), log(1-p) = -log(1 + e^eta)
    return float(-np.sum(y * np.logaddexp(0, -eta) + (1 - y) * np.logaddexp(0, eta)))


def fit_logistic(X, y, names: Sequence[str] | None = None, max_iter: int = 25, tol: float = 1e-8) -> FittedModel:
    """Maximum-likelihood logistic regression by IRLS (Newton-Raphson).

    Predictors are centred and scaled internally; the returned coefficients
    are on the original scale.  Newton steps that lower the likelihood are
    halved.  Convergence means every score component on the original scale
    is below ``tol`` in absolute value; otherwise the last iterate is
    returned with ``converged=False``.
    """
    X, y = _design(X, y)
    if not np.all((y == 0) | (y == 1)):
        raise FitError("logistic response must be 0/1")
    if y.min() == y.max():
        raise FitError("logistic response has a single class")
    n, p = X.shape
    names = _names(p, names)
    keep = independent_columns(X)
    if n < len(keep) + 1:
        raise FitError(f"{n} rows cannot fit {len(keep)} predictors plus intercept")
    Xk = X[:, keep]
    mu = Xk.mean(axis=0)
    sd = Xk.std(axis=0)
    Z = np.column_stack([np.ones(n), (Xk - mu) / sd])
    A = np.column_stack([np.ones(n), Xk])

    def to_original(b: np.ndarray) -> np.ndarray:
        slopes = b[1:] / sd
        return np.concatenate([[b[0] - slopes @ mu], slopes])

    ybar = y.mean()
    b = np.zeros(Z.shape[1])
    b[0] = math.log(ybar / (1 - ybar))
    eta = Z @ b
    ll = _loglik(eta, y)
    converged = separated = False
    it = 0
    for it in range(1, max_iter + 1):
        prob = expit(eta)
        w = prob * (1 - prob)
        score = Z.T @ (y - prob)
        H = Z.T @ (Z * w[:, None])
        try:
            step = np.linalg.solve(H, score)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, score, rcond=None)[0]
        t = 1.0
        for _ in range(30):
            cand = b + t * step
            cand_eta = Z @ cand
            cand_ll = _loglik(cand_eta, y)
            if cand_ll >= ll - 1e-12 * abs(ll):
                break
            t /= 2
        b, eta, ll = cand, cand_eta, cand_ll
        resid = y - expit(A @ to_original(b))
        # Under complete separation the score vanishes while the slopes
        # diverge; keep iterating to the cap so the fit is flagged.
        separated = np.max(np.abs(resid)) < 1e-6
        if np.max(np.abs(A.T @ resid)) < tol and not separated:
            converged = True
            break
    beta = to_original(b)
    coef = np.zeros(p)
    coef[keep] = beta[1:]
    dropped = tuple(names[j] for j in range(p) if j not in keep)
    notes = [f"dropped collinear column {d}" for d in dropped]
    if not converged:
        notes.append(f"no convergence after {it} iterations" + (" (separation)" if separated else ""))
    return FittedModel("logistic", names, float(beta[0]), coef, converged, it, dropped, notes)


def r_squared(X, y, model: FittedModel) -> float:
    X, y = _design(X, y)
    resid = y - model.predict(X)
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0:
        return 1.0
    return 1.0 - float(np.dot(resid, resid)) / tss


def adjusted_r2(X, y, model: FittedModel | None = None) -> float:
    """1 - (1 - R^2)(n - 1)/(n - p - 1), p = predictors kept by the fit."""
    X, y = _design(X, y)
    if model is None:
        model = fit_linear(X, y)
    n = y.size
    p = model.n_retained
    if n - p - 1 <= 0:
        raise FitError(f"adjusted R^2 undefined for n={n}, p={p}")
    return 1.0 - (1.0 - r_squared(X, y, model)) * (n - 1) / (n - p - 1)


# -- evaluation ----------------------------------------------------------------


def mse(predicted: Sequence[float], actual: Sequence[float]) -> float:
    a, b = _pair(predicted, actual, 1)
    return float(np.mean((a - b) ** 2))


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """P(score_pos > score_neg) + 0.5 P(tie), via the rank-sum identity."""
    s, lab = _pair(scores, labels, 1)
    pos = lab == 1
    n_pos = int(pos.sum())
    n_neg = int((lab == 0).sum())
    if n_pos + n_neg != lab.size:
        raise EvaluationError("labels must be 0/1")
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError("AUC needs both classes")
    r = rankdata(s)
    return float((r[pos].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def _u_distribution(m: int, n: int) -> np.ndarray:
    """Counts of each U value over all C(m+n, m) tie-free arrangements."""
    # f[i][j] = counts for samples of sizes i, j; recurrence on the largest value.
    f = [[None] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        for j in range(n + 1):
            if i == 0 or j == 0:
                f[i][j] = np.array([1], dtype=object)
                continue
            size = i * j + 1
            out = np.zeros(size, dtype=object)
            # largest value in the first sample: beats all j of the second
            a = f[i - 1][j]
            out[j : j + a.size] += a
            b = f[i][j - 1]
            out[: b.size] += b
            f[i][j] = out
    return np.array(f[m][n], dtype=float)


@dataclass(frozen=True)
class MannWhitney:
    u: float
    p: float
    method: str  # "exact" or "normal"


def mann_whitney_u(a: Sequence[float], b: Sequence[float], method: str = "auto") -> MannWhitney:
    """Two-sided Mann-Whitney U test; U is reported for ``a``.

    ``auto`` uses the exact null distribution when both samples have at most
    8 values and there are no ties, and the normal approximation with tie
    and continuity corrections otherwise.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("Mann-Whitney needs two non-empty samples")
    n1, n2 = x.size, y.size
    pooled = np.concatenate([x, y])
    ranks = rankdata(pooled)
    u = float(ranks[:n1].sum() - n1 * (n1 + 1) / 2)
    _, counts = np.unique(pooled, return_counts=True)
    ties = bool(np.any(counts > 1))
    if method == "auto":
        method = "exact" if max(n1, n2) <= 8 and not ties else "normal"
    if method == "exact":
        if ties:
            raise ValueError("exact Mann-Whitney requires tie-free samples")
        dist = _u_distribution(n1, n2)
        total = dist.sum()
        k = int(round(u))
        lower = dist[: k + 1].sum() / total
        upper = dist[k:].sum() / total
        return MannWhitney(u, float(min(1.0, 2 * min(lower, upper))), "exact")
    if method != "normal":
        raise ValueError(f"unknown method {method!r}")
    n = n1 + n2
    mean = n1 * n2 / 2
    tie_term = float(np.sum(counts.astype(float) ** 3 - counts)) / (n * (n - 1)) if n > 1 else 0.0
    var = n1 * n2 / 12 * ((n + 1) - tie_term)
    if var <= 0:
        return MannWhitney(u, 1.0, "normal")
    z = max(abs(u - mean) - 0.5, 0.0) / math.sqrt(var)
    return MannWhitney(u, min(1.0, math.erfc(z / math.sqrt(2))), "normal")


CLIFF_THRESHOLDS = (0.147, 0.33, 0.474)


def cliff_magnitude(d: float) -> str:
    m = abs(d)
    small, medium, large = CLIFF_THRESHOLDS
    if m < small:
        return "negligible"
    if m < medium:
        return "small"
    if m < large:
        return "medium"
    return "large"


@dataclass(frozen=True)
class EffectSize:
    cliffs_d: float
    magnitude: str


def cliffs_delta(a: Sequence[float], b: Sequence[float]) -> EffectSize:
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("Cliff's delta needs two non-empty samples")
    ys = np.sort(y)
    below = np.searchsorted(ys, x, side="left")  # b_j < a_i
    above = y.size - np.searchsorted(ys, x, side="right")  # b_j > a_i
    d = float(below.sum() - above.sum()) / (x.size * y.size)
    return EffectSize(d, cliff_magnitude(d))
