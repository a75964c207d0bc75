"""Acceptance checks, one per criterion.

Run under pytest, or directly with ``python3 tests/test_acceptance.py`` to get
the PASS/FAIL summary alone.  Each check prints one line.
"""

from __future__ import annotations

import csv
import json
import math
import sys
import tempfile
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from conftest import FIXTURES, MINI  # noqa: E402
from oracles import (  # noqa: E402
    brute_auc,
    exact_mann_whitney_p,
    gini_mean_difference,
    halstead_from_counts,
    naive_aggregate,
)

from metricagg.aggregate import TECHNIQUES, aggregate  # noqa: E402
from metricagg.cli import main  # noqa: E402
from metricagg.corpus import extract_corpus  # noqa: E402
from metricagg.extract import segment_methods, tokenize  # noqa: E402
from metricagg.extract.cfg import build_cfg  # noqa: E402
from metricagg.extract.complexity import cyclomatic  # noqa: E402
from metricagg.filtering import redun_eliminate, redundancy_scores, select_representatives, varclus  # noqa: E402
from metricagg.io import methods_to_csv, sha256_bytes  # noqa: E402
from metricagg.matrix import MetricMatrix  # noqa: E402
from metricagg.stats import (  # noqa: E402
    auc,
    cliff_magnitude,
    cliffs_delta,
    fit_linear,
    fit_logistic,
    mann_whitney_u,
)
from metricagg.study import build_dataset  # noqa: E402
from metricagg.study.cv import CvPlan, fold_ids, repeated_cv, repetition_rng  # noqa: E402
from metricagg.study.rq import KINDS, StudyConfig, correlation_increase, rq3_tables, run_rq3  # noqa: E402
from metricagg.study.synth import SynthParams, synth_corpus  # noqa: E402

ALL = [t.value for t in TECHNIQUES]


def report(number: int, ok: bool, detail: str) -> tuple[bool, str]:
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}", flush=True)
    return ok, detail


def near(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(b))


# -- 1 -------------------------------------------------------------------------------


def check_1():
    rng = np.random.default_rng(20240101)
    bad = []
    for case in range(1000):
        n = int(rng.integers(1, 51))
        kind = case % 4
        if kind == 0:
            x = rng.uniform(0, 100, n)
        elif kind == 1:
            x = rng.lognormal(2, 1.2, n)
        elif kind == 2:
            x = rng.integers(0, 20, n).astype(float)
        else:
            x = rng.poisson(0.5, n).astype(float)
        x = x.tolist()
        for t in ALL:
            if not near(aggregate(x, t), naive_aggregate(x, t)):
                bad.append((case, t))
        if sum(x) > 0 and not near(aggregate(x, "gini"), gini_mean_difference(x)):
            bad.append((case, "gini-mad"))
    return report(1, not bad, f"1000 vectors x 9 techniques vs naive oracle, Gini vs mean abs difference; {len(bad)} mismatches")


# -- 2 -------------------------------------------------------------------------------


def check_2():
    rng = np.random.default_rng(777)
    bad = []
    for case in range(200):
        n = int(rng.integers(1, 51))
        x = rng.lognormal(1.5, 1.0, n) if case % 2 else rng.integers(0, 50, n).astype(float)
        c = float(rng.choice([0.25, 3.0, 17.5]))
        shift = float(rng.choice([-7.0, 2.5, 40.0]))
        base = {t: aggregate(x, t) for t in ALL}
        scaled = {t: aggregate(c * x, t) for t in ALL}
        moved = {t: aggregate(x + shift, t) for t in ("avg", "med", "sd", "iqr", "skew", "kurt")}
        perm = {t: aggregate(rng.permutation(x), t) for t in ALL}
        tol = 1e-8
        for t in ("sum", "avg", "med", "sd", "iqr"):
            if not near(scaled[t], c * base[t], tol):
                bad.append((case, "scale", t))
        for t in ("skew", "kurt", "theil", "gini"):
            if not near(scaled[t], base[t], tol):
                bad.append((case, "scale", t))
        for t in ("avg", "med"):
            if not near(moved[t], base[t] + shift, tol):
                bad.append((case, "shift", t))
        for t in ("sd", "iqr", "skew", "kurt"):
            if not near(moved[t], base[t], tol):
                bad.append((case, "shift", t))
        for t in ALL:
            if not near(perm[t], base[t], tol):
                bad.append((case, "perm", t))
    return report(2, not bad, f"200 vectors, scale/translation/permutation over 9 techniques; {len(bad)} violations")


# -- 3 -------------------------------------------------------------------------------


def check_3():
    with open(FIXTURES / "hand_counts.csv", newline="") as fh:
        hand = list(csv.DictReader(fh))
    got = {(r.file, r.method): r for r in extract_corpus(MINI).records}
    bad = []
    for row in hand:
        rec = got.get((row["file"], row["method"]))
        if rec is None:
            bad.append((row["method"], "missing"))
            continue
        for m in ("start_line", "loc", "vg", "evg", "ivg"):
            if getattr(rec, m) != int(row[m]):
                bad.append((row["method"], m))
        h = halstead_from_counts(int(row["n1"]), int(row["n2"]), int(row["N1"]), int(row["N2"]))
        mapping = dict(N="hal_n", V="hal_v", L="hal_l", D="hal_d", I="hal_i", E="hal_e", B="hal_b", T="hal_t")
        for k, field in mapping.items():
            if not math.isclose(getattr(rec, field), h[k], rel_tol=1e-12, abs_tol=1e-15):
                bad.append((row["method"], field))
    if len(got) != len(hand):
        bad.append(("count", len(got)))
    graph_bad = 0
    for path in sorted(MINI.rglob("*.java")):
        for span in segment_methods(tokenize(path.read_text()), path.name):
            g = build_cfg(span)
            if cyclomatic(g) != g.n_edges - g.n_nodes + 2:
                graph_bad += 1
    kinds = {
        "straight-line": any(int(r["vg"]) == 1 for r in hand),
        "nested structured": any(int(r["vg"]) >= 3 and int(r["evg"]) == 1 for r in hand),
        "unstructured break": any(int(r["evg"]) > 1 for r in hand),
        "call-bearing": any(1 < int(r["ivg"]) for r in hand),
    }
    ok = not bad and graph_bad == 0 and len(hand) >= 12 and all(kinds.values())
    return report(3, ok, f"{len(hand)} hand-analyzed methods, {len(bad)} metric mismatches, {graph_bad} E-N+2 mismatches, coverage {kinds}")


# -- 4 -------------------------------------------------------------------------------


def check_4():
    rng = np.random.default_rng(4444)
    auc_bad = 0
    for _ in range(500):
        n = int(rng.integers(2, 11))
        labels = rng.integers(0, 2, n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        scores = rng.integers(0, 5, n).astype(float) if rng.random() < 0.5 else rng.random(n)
        if abs(auc(scores, labels) - brute_auc(scores.tolist(), labels.tolist())) > 1e-12:
            auc_bad += 1
    # Every tie-free configuration for sizes up to 8: the p-value depends only on U,
    # so one representative sample per attainable U covers all samples.
    worst = (0.0, None)
    exact_bad = 0
    failing_pairs = set()
    for n1 in range(1, 9):
        for n2 in range(1, 9):
            for u in range(n1 * n2 + 1):
                a, b = _sample_with_u(n1, n2, u)
                res = mann_whitney_u(a, b, method="exact")
                exact = res.p
                if res.u != u:
                    exact_bad += 1
                normal = mann_whitney_u(a, b, method="normal").p
                if n1 + n2 <= 10 and abs(exact - exact_mann_whitney_p(a, b)) > 1e-12:
                    exact_bad += 1
                gap = abs(normal - exact)
                if gap > 0.02:
                    failing_pairs.add((n1, n2))
                if gap > worst[0]:
                    worst = (gap, (n1, n2, u))
    cliff_ok = all(
        cliff_magnitude(d) == lab
        for d, lab in [(0.1469, "negligible"), (0.147, "small"), (0.3299, "small"), (0.33, "medium"),
                       (0.4739, "medium"), (0.474, "large"), (-0.2, "small"), (1.0, "large")]
    )
    cliff_ok &= cliffs_delta([4, 5, 6], [1, 2, 3]).magnitude == "large"
    mw_ok = worst[0] <= 0.02
    ok = auc_bad == 0 and exact_bad == 0 and mw_ok and cliff_ok
    detail = (
        f"AUC vs brute force 500 cases: {auc_bad} mismatches; exact MW vs enumeration: {exact_bad} mismatches; "
        f"Cliff thresholds: {'ok' if cliff_ok else 'wrong'}; normal-vs-exact MW max gap {worst[0]:.4f} "
        f"at (n1, n2, U) = {worst[1]} (limit 0.02); {len(failing_pairs)}/64 size pairs exceed the limit"
    )
    return report(4, ok, detail)


def _sample_with_u(n1: int, n2: int, u: int) -> tuple[list[float], list[float]]:
    """Tie-free samples where ``a`` beats exactly ``u`` of the pairs."""
    # Place a's values among b's sorted values: a_i sits above c_i of them.
    counts = []
    left = u
    for _ in range(n1):
        c = min(n2, left)
        counts.append(c)
        left -= c
    b = [float(10 * j) for j in range(n2)]
    a = [10.0 * c - 5.0 + 0.01 * i for i, c in enumerate(counts)]
    return a, b


# -- 5 -------------------------------------------------------------------------------


def check_5():
    rng = np.random.default_rng(55)
    orth = 0.0
    for _ in range(200):
        n, p = int(rng.integers(10, 80)), int(rng.integers(1, 8))
        X = rng.normal(size=(n, p)) * rng.uniform(0.1, 100, p)
        y = X @ rng.normal(size=p) + rng.normal(scale=rng.uniform(0.1, 10), size=n) + 5
        m = fit_linear(X, y)
        r = y - m.predict(X)
        A = np.column_stack([np.ones(n), X])
        orth = max(orth, float(np.max(np.abs(A.T @ r)) / np.linalg.norm(y)))
    score, fitted, converged = 0.0, 0, 0
    for _ in range(200):
        n, p = int(rng.integers(30, 150)), int(rng.integers(1, 5))
        X = rng.normal(size=(n, p))
        eta = 0.2 + X @ rng.normal(scale=0.8, size=p)
        y = (rng.random(n) < 1 / (1 + np.exp(-eta))).astype(float)
        if y.min() == y.max():
            continue
        fitted += 1
        m = fit_logistic(X, y)
        if m.converged:
            converged += 1
            A = np.column_stack([np.ones(n), X])
            score = max(score, float(np.max(np.abs(A.T @ (y - m.predict(X))))))
    X = rng.normal(size=(100, 4))
    y = 3 + X @ np.array([1.0, -2.0, 0.5, 4.0])
    cv = repeated_cv(X, y, "linear", CvPlan(seed=5))
    worst_mse = float(np.max(cv.values))
    ok = orth < 1e-6 and score < 1e-6 and converged > 0 and worst_mse < 1e-10 and cv.fold_values.size == 100
    return report(
        5, ok,
        f"max |X'r|/|y| = {orth:.2e}; max logistic score at convergence = {score:.2e} ({converged}/{fitted} converged); "
        f"max fold MSE on exact-linear data = {worst_mse:.2e}",
    )


# -- 6 -------------------------------------------------------------------------------


def check_6():
    rng = np.random.default_rng(66)
    a, b = rng.normal(size=100), rng.normal(size=100)
    m = MetricMatrix(("A", "B", "C"), np.column_stack([a, b, a + b]))
    red = redun_eliminate(m)
    survivors = redundancy_scores(m.select(red.retained))
    red_ok = len(red.discarded) == 1 and all(v < 0.9 for v in survivors.values())
    x = rng.lognormal(size=100)
    cl = MetricMatrix(("loc.theil", "loc.med", "loc.iqr"), np.column_stack([x, 3 * x + 0.01 * rng.normal(size=100), np.sqrt(x)]))
    rep = select_representatives(varclus(cl))
    rep_ok = rep.retained == ["loc.med"]
    return report(
        6, red_ok and rep_ok,
        f"C = A + B: dropped {[d.var for d in red.discarded]}, survivor R^2 {[round(v, 3) for v in survivors.values()]}; "
        f"{{Theil, Med, IQR}} cluster keeps {rep.retained}",
    )


# -- 7 -------------------------------------------------------------------------------


def check_7():
    sums, meds = [], []
    for seed in range(1, 21):
        c = synth_corpus(SynthParams(), seed)
        t = correlation_increase(build_dataset(f"s{seed}", c.methods, c.bugs))
        sums.append(t.cell(("vg", "relative"), "sum"))
        meds.append(t.cell(("vg", "relative"), "med"))
    ms, mm = float(np.median(sums)), float(np.median(meds))
    return report(7, ms > 0 and mm <= 0, f"20 synthetic corpora: median relative delta for vg, Sum {ms:+.4f}, Med {mm:+.4f}")


# -- 8 -------------------------------------------------------------------------------


def check_8():
    c = synth_corpus(SynthParams(), 1)
    d = build_dataset("synthetic", c.methods, c.bugs)
    cfg = StudyConfig(seed=8)
    result = run_rq3(d, cfg, labels=("all", "sum", "med"))
    tables = rq3_tables(result, labels=("all", "sum", "med"))
    auc_ok = all(
        result.outcome(f, "sum", "logistic").mean > result.outcome(f, "med", "logistic").mean for f in ("F1", "F2")
    )
    stats = tables["rq3_stats"]
    ds = {(r[1], r[2]): r[4] for r in stats.rows}
    d_ok = all(v is not None and v < 0.147 for v in ds.values())
    part_bad = 0
    n = d.n_files
    for kind in KINDS:
        target = d.defective if kind == "logistic" else None
        for rep in range(cfg.repetitions):
            folds = fold_ids(n, cfg.k, repetition_rng(cfg.seed, d.name, kind, rep), target)
            sizes = np.bincount(folds, minlength=cfg.k)
            covered = np.sort(np.concatenate([np.flatnonzero(folds == f) for f in range(cfg.k)]))
            if sizes.max() - sizes.min() > 1 or not np.array_equal(covered, np.arange(n)):
                part_bad += 1
    aucs = {f: (round(result.outcome(f, "sum", "logistic").mean, 3), round(result.outcome(f, "med", "logistic").mean, 3)) for f in ("F1", "F2")}
    detail = f"AUC (Sum, Med) {aucs}; All-vs-Sum |d| {({k: round(v, 3) for k, v in ds.items()})}; bad partitions {part_bad}/20"
    return report(8, auc_ok and d_ok and part_bad == 0, detail)


# -- 9 -------------------------------------------------------------------------------


def check_9():
    c = synth_corpus(SynthParams(), 9)
    with tempfile.TemporaryDirectory() as tmp:
        data = Path(tmp) / "methods.csv"
        data.write_text(methods_to_csv(c.methods, c.bugs))
        bundles = []
        for name in ("first", "second"):
            out = Path(tmp) / name
            code = main(["study", "all", "-i", str(data), "--seed", "42", "--out", str(out), "-q"])
            if code != 0:
                return report(9, False, f"study all exited {code}")
            bundles.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    same = bundles[0] == bundles[1]
    manifest = json.loads(bundles[0]["run_manifest.json"])
    digests_ok = all(sha256_bytes(bundles[0][n]) == h for n, h in manifest["reports"].items())
    digests_ok &= set(manifest["reports"]) == set(bundles[0]) - {"run_manifest.json"}
    return report(9, same and digests_ok, f"{len(bundles[0])} files, byte-identical: {same}, manifest digests match: {digests_ok}")


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9]


def _run(check, capsys):
    with capsys.disabled():
        ok, detail = check()
    assert ok, detail


def test_criterion_1(capsys):
    _run(check_1, capsys)


def test_criterion_2(capsys):
    _run(check_2, capsys)


def test_criterion_3(capsys):
    _run(check_3, capsys)


def test_criterion_4(capsys):
    _run(check_4, capsys)


def test_criterion_5(capsys):
    _run(check_5, capsys)


def test_criterion_6(capsys):
    _run(check_6, capsys)


def test_criterion_7(capsys):
    _run(check_7, capsys)


def test_criterion_8(capsys):
    _run(check_8, capsys)


def test_criterion_9(capsys):
    _run(check_9, capsys)


if __name__ == "__main__":
    results = [check()[0] for check in CHECKS]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
