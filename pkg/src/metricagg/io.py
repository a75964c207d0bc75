"""Corpus scanning, CSV formats, defect labels and atomic file output."""

from __future__ import annotations

import csv
import fnmatch
import hashlib
import io
import os
import posixpath
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .extract import METHOD_CSV_HEADER, METRICS, MethodMetrics
from .matrix import MetricMatrix

DEFAULT_INCLUDE = ("*.java", "*.c", "*.h", "*.cc", "*.cpp", "*.cxx", "*.hpp", "*.cs")
_INT_METRICS = {"start_line", "loc", "vg", "evg", "ivg"}


class InputError(ValueError):
    """Malformed input data, with the offending line when known."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.source = source

    def __str__(self) -> str:
        where = self.source or "<input>"
        if self.line is not None:
            where += f":{self.line}"
        return f"{where}: {self.message}"


# -- paths -----------------------------------------------------------------------


def normalize_path(path: str) -> str:
    """Forward slashes, no ``.`` segments or leading ``./``; idempotent."""
    p = str(path).strip().replace("\\", "/")
    if not p:
        raise ValueError("empty path")
    p = posixpath.normpath(p)
    while p.startswith("./"):
        p = p[2:]
    return p


def _matches(rel: str, patterns: Sequence[str]) -> bool:
    base = rel.rsplit("/", 1)[-1]
    return any(fnmatch.fnmatchcase(rel, g) or ("/" not in g and fnmatch.fnmatchcase(base, g)) for g in patterns)


def scan_corpus(root: str | Path, include: Sequence[str] = DEFAULT_INCLUDE, exclude: Sequence[str] = ()) -> list[str]:
    """Relative paths of matching source files, sorted lexicographically.

    Symbolic links are skipped, so link cycles cannot be entered.  A
    pattern without ``/`` is matched against the file name, otherwise
    against the whole relative path.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus root not found: {root}")
    found = []
    for dirpath, dirnames, filenames in os.walk(root, followlinks=False):
        dirnames[:] = [d for d in dirnames if not os.path.islink(os.path.join(dirpath, d))]
        for name in filenames:
            full = os.path.join(dirpath, name)
            if os.path.islink(full):
                continue
            rel = normalize_path(os.path.relpath(full, root))
            if _matches(rel, include) and not _matches(rel, exclude):
                found.append(rel)
    return sorted(found)


# -- defect labels -----------------------------------------------------------------


@dataclass(frozen=True)
class DefectRecord:
    file: str
    bugs: int

    @property
    def defective(self) -> bool:
        return self.bugs > 0


def parse_defects(text: str, source: str = "<defects>") -> list[DefectRecord]:
    """Parse a ``file,bugs`` CSV.  LF and CRLF line endings are equivalent."""
    lines = text.splitlines()
    reader = csv.reader(lines)
    records: list[DefectRecord] = []
    seen: dict[str, int] = {}
    header_done = False
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        cells = [c.strip() for c in row]
        if not header_done:
            if [c.lower() for c in cells] != ["file", "bugs"]:
                raise InputError("header must be 'file,bugs'", lineno, source)
            header_done = True
            continue
        if len(cells) != 2:
            raise InputError(f"expected 2 fields, got {len(cells)}", lineno, source)
        try:
            path = normalize_path(cells[0])
        except ValueError:
            raise InputError("empty file path", lineno, source) from None
        try:
            bugs = int(cells[1])
        except ValueError:
            raise InputError(f"bug count is not an integer: {cells[1]!r}", lineno, source) from None
        if bugs < 0:
            raise InputError(f"negative bug count {bugs}", lineno, source)
        if path in seen:
            raise InputError(f"duplicate path {path} (first on line {seen[path]})", lineno, source)
        seen[path] = lineno
        records.append(DefectRecord(path, bugs))
    if not header_done:
        raise InputError("empty defect file", None, source)
    return records


def read_defects(path: str | Path) -> list[DefectRecord]:
    return parse_defects(Path(path).read_text(encoding="utf-8"), str(path))


def defects_to_csv(records: Iterable[DefectRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["file", "bugs"])
    for r in records:
        w.writerow([r.file, r.bugs])
    return buf.getvalue()


# -- numbers -----------------------------------------------------------------------


def num(value) -> str:
    """Shortest round-tripping C-locale text for a data value."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


# -- method CSV --------------------------------------------------------------------


def methods_to_csv(records: Iterable[MethodMetrics], bugs: dict[str, int] | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(METHOD_CSV_HEADER) + (["bugs"] if bugs is not None else []))
    for r in records:
        row = [r.file, r.method] + [num(getattr(r, c)) for c in METHOD_CSV_HEADER[2:]]
        if bugs is not None:
            row.append(str(bugs[r.file]))
        w.writerow(row)
    return buf.getvalue()


def parse_methods(text: str, source: str = "<methods>") -> tuple[list[MethodMetrics], dict[str, int] | None]:
    """Read a method CSV, optionally carrying a per-file ``bugs`` column."""
    reader = csv.reader(text.splitlines())
    try:
        header = [c.strip() for c in next(reader)]
    except StopIteration:
        raise InputError("empty method CSV", None, source) from None
    base = list(METHOD_CSV_HEADER)
    if header == base:
        has_bugs = False
    elif header == base + ["bugs"]:
        has_bugs = True
    else:
        raise InputError("unexpected method CSV header", 1, source)
    records: list[MethodMetrics] = []
    bugs: dict[str, int] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise InputError(f"expected {len(header)} fields, got {len(row)}", lineno, source)
        values = {}
        try:
            for name, cell in zip(METHOD_CSV_HEADER[2:], row[2:]):
                values[name] = int(cell) if name in _INT_METRICS else float(cell)
        except ValueError as exc:
            raise InputError(f"bad number: {exc}", lineno, source) from None
        file = normalize_path(row[0])
        records.append(MethodMetrics(file=file, method=row[1], **values))
        if has_bugs:
            try:
                b = int(row[-1])
            except ValueError:
                raise InputError(f"bug count is not an integer: {row[-1]!r}", lineno, source) from None
            if b < 0:
                raise InputError(f"negative bug count {b}", lineno, source)
            if bugs.setdefault(file, b) != b:
                raise InputError(f"conflicting bug counts for {file}", lineno, source)
    return records, (bugs if has_bugs else None)


# -- file-level CSV ------------------------------------------------------------------


def files_to_csv(matrix: MetricMatrix, bugs: Sequence[float] | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["file"] + list(matrix.columns) + (["bugs", "defective"] if bugs is not None else []))
    for i, name in enumerate(matrix.rows):
        row = [name] + [num(v) for v in matrix.values[i]]
        if bugs is not None:
            row += [num(bugs[i]), str(int(bugs[i] > 0))]
        w.writerow(row)
    return buf.getvalue()


def parse_files(text: str, source: str = "<files>") -> tuple[MetricMatrix, np.ndarray | None]:
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise InputError("empty file CSV", None, source) from None
    if not header or header[0] != "file":
        raise InputError("first column must be 'file'", 1, source)
    has_bugs = header[-2:] == ["bugs", "defective"]
    cols = header[1:-2] if has_bugs else header[1:]
    names, rows, bugs = [], [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise InputError(f"expected {len(header)} fields, got {len(row)}", lineno, source)
        try:
            rows.append([float(c) for c in row[1 : 1 + len(cols)]])
            if has_bugs:
                bugs.append(float(row[-2]))
        except ValueError as exc:
            raise InputError(f"bad number: {exc}", lineno, source) from None
        names.append(row[0])
    values = np.array(rows, dtype=float).reshape(len(rows), len(cols))
    return MetricMatrix(tuple(cols), values, tuple(names)), (np.array(bugs) if has_bugs else None)


def method_matrix(records: Sequence[MethodMetrics]) -> tuple[MetricMatrix, tuple[str, ...]]:
    m = MetricMatrix.from_records(records, METRICS, row_key=lambda r: f"{r.file}:{r.start_line}:{r.method}")
    return m, tuple(r.file for r in records)


# -- output ------------------------------------------------------------------------


def atomic_write(path: str | Path, text: str) -> None:
    """Write UTF-8 text with ``\\n`` newlines via a temp file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()

