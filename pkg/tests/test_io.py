from __future__ import annotations

import os

import numpy as np
import pytest
from conftest import FIXTURES, MINI
from hypothesis import given
from hypothesis import strategies as st

from metricagg.aggregate import file_columns
from metricagg.config import ConfigError, RunConfig, parse_config
from metricagg.corpus import extract_corpus
from metricagg.io import (
    InputError,
    atomic_write,
    defects_to_csv,
    files_to_csv,
    method_matrix,
    methods_to_csv,
    normalize_path,
    num,
    parse_defects,
    parse_files,
    parse_methods,
    read_defects,
    scan_corpus,
)
from metricagg.matrix import aggregate_matrix

# -- defects -------------------------------------------------------------------------


def test_defect_examples():
    recs = parse_defects("file,bugs\na.java,3\nb.java,0\n")
    assert [(r.file, r.bugs, r.defective) for r in recs] == [("a.java", 3, True), ("b.java", 0, False)]


def test_crlf_equals_lf():
    text = "file,bugs\n./src\\A.java,2\nsrc/B.java,0\n"
    assert parse_defects(text.replace("\n", "\r\n")) == parse_defects(text)
    assert parse_defects(text)[0].file == "src/A.java"


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("file,bugs\na.java,-1\n", 2, "negative"),
        ("file,bugs\na.java,1\nb.java,2\n./a.java,3\n", 4, "duplicate"),
        ("file,bugs\na.java,1\nb.java\n", 3, "expected 2 fields"),
        ("file,bugs\na.java,x\n", 2, "integer"),
        ("path,count\n", 1, "header"),
    ],
)
def test_defect_errors(text, line, fragment):
    with pytest.raises(InputError) as info:
        parse_defects(text, "d.csv")
    assert info.value.line == line
    assert fragment in str(info.value)
    assert str(info.value).startswith(f"d.csv:{line}:")


def test_defects_round_trip(tmp_path):
    text = "file,bugs\na.java,3\nsrc/b.java,0\n"
    recs = parse_defects(text)
    assert defects_to_csv(recs) == text
    p = tmp_path / "d.csv"
    p.write_bytes(text.replace("\n", "\r\n").encode())
    assert read_defects(p) == recs


# -- paths and scanning ----------------------------------------------------------------


@given(st.lists(st.sampled_from(["a", "b.java", ".", "src", "x y"]), min_size=1, max_size=6), st.sampled_from(["/", "\\"]))
def test_normalize_idempotent(parts, sep):
    p = sep.join(parts)
    if normalize_path(p) in (".", ""):
        return
    once = normalize_path(p)
    assert normalize_path(once) == once
    assert "\\" not in once and not once.startswith("./")


def test_scan_golden_listing():
    expected = (FIXTURES / "mini_files.txt").read_text().split()
    assert scan_corpus(MINI) == expected


def test_scan_globs(tmp_path):
    assert scan_corpus(tmp_path) == []
    assert scan_corpus(MINI, exclude=["*.java"]) == []
    assert scan_corpus(MINI, include=["demo/*.java"]) == ["demo/Flow.java", "demo/Shapes.java"]
    assert scan_corpus(MINI, include=["*.txt"]) == ["NOTES.txt"]


def test_scan_skips_symlink_cycles(tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "a" / "X.java").write_text("class X {}\n")
    os.symlink(tmp_path, tmp_path / "a" / "loop")
    os.symlink(tmp_path / "a" / "X.java", tmp_path / "Y.java")
    assert scan_corpus(tmp_path) == ["a/X.java"]


def test_scan_missing_root(tmp_path):
    with pytest.raises(FileNotFoundError):
        scan_corpus(tmp_path / "nope")


# -- CSV formats ------------------------------------------------------------------------


def test_num():
    assert num(3) == "3" and num(3.0) == "3" and num(np.int64(4)) == "4"
    assert num(0.1) == "0.1" and float(num(1 / 3)) == 1 / 3


def test_method_csv_round_trip():
    records = extract_corpus(MINI).records
    text = methods_to_csv(records)
    parsed, bugs = parse_methods(text)
    assert bugs is None
    assert parsed == records
    assert methods_to_csv(parsed) == text
    with_bugs = methods_to_csv(records, {r.file: 1 for r in records})
    again, bugs = parse_methods(with_bugs)
    assert methods_to_csv(again, bugs) == with_bugs


def test_synthetic_fixture_round_trip():
    text = (FIXTURES / "synth60.csv").read_text()
    records, bugs = parse_methods(text)
    assert methods_to_csv(records, bugs) == text


def test_method_csv_errors():
    header = "file,method,start_line,loc,vg,evg,ivg,hal_n,hal_v,hal_l,hal_d,hal_i,hal_e,hal_b,hal_t"
    with pytest.raises(InputError) as info:
        parse_methods(header + "\na.java,m,1,2\n")
    assert info.value.line == 2
    with pytest.raises(InputError):
        parse_methods("x,y\n")
    with pytest.raises(InputError):
        parse_methods(header + ",bugs\na.java,m,1,2,1,1,1,3,1,1,1,1,1,1,1,1\na.java,n,5,2,1,1,1,3,1,1,1,1,1,1,1,2\n")


def test_file_csv_round_trip():
    m, groups = method_matrix(extract_corpus(MINI).records)
    files = aggregate_matrix(m, groups)
    assert list(files.columns) == file_columns()
    bugs = np.arange(files.n_rows, dtype=float)
    text = files_to_csv(files, bugs)
    assert text.splitlines()[0].endswith(",bugs,defective")
    back, b = parse_files(text)
    assert back.columns == files.columns and back.rows == files.rows
    assert np.array_equal(back.values, files.values) and np.array_equal(b, bugs)
    assert files_to_csv(back, b) == text


def test_atomic_write(tmp_path):
    target = tmp_path / "sub" / "r.csv"
    atomic_write(target, "a,b\n1,2\n")
    assert target.read_bytes() == b"a,b\n1,2\n"
    atomic_write(target, "new\n")
    assert target.read_text() == "new\n"
    assert sorted(p.name for p in target.parent.iterdir()) == ["r.csv"]


# -- configuration ----------------------------------------------------------------------


def test_parse_config():
    cfg = parse_config("# run\nseed = 7\ninclude = *.java, *.c\nstratified = no\ncluster-threshold = 0.8\nout = rep\n")
    assert cfg == {"seed": 7, "include": ["*.java", "*.c"], "stratified": False, "cluster_threshold": 0.8, "out": "rep"}


@pytest.mark.parametrize("text, line", [("seed = 1\nbogus = 2\n", 2), ("seed\n", 1), ("k = ten\n", 1), ("stratified = maybe\n", 1)])
def test_config_errors(text, line):
    with pytest.raises(InputError) as info:
        parse_config(text, "c.cfg")
    assert info.value.line == line


@pytest.mark.parametrize(
    "kwargs",
    [dict(cluster_threshold=1.0), dict(redundancy_cutoff=0.0), dict(k=1), dict(repetitions=0), dict(root="/does/not/exist")],
)
def test_run_config_validation(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(**kwargs).validate()


def test_seed_required_when_asked():
    RunConfig().validate()
    with pytest.raises(ConfigError):
        RunConfig().validate(need_seed=True)
