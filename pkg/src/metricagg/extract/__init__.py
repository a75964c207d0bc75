"""Method-level code metric extraction."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

from .cfg import ControlFlowGraph, build_cfg
from .complexity import cyclomatic, design_complexity, essential
from .halstead import halstead
from .lexer import ExtractionError, Token, tokenize
from .methods import MethodSpan, segment_methods

# Column order used everywhere (CSV headers, aggregation, tie-breaking).
METRICS = (
    "loc",
    "vg",
    "evg",
    "ivg",
    "hal_n",
    "hal_v",
    "hal_l",
    "hal_d",
    "hal_i",
    "hal_e",
    "hal_b",
    "hal_t",
)

METHOD_CSV_HEADER = ("file", "method", "start_line") + METRICS


@dataclass(frozen=True)
class MethodMetrics:
    file: str
    method: str
    start_line: int
    loc: int
    vg: int
    evg: int
    ivg: int
    hal_n: float
    hal_v: float
    hal_l: float
    hal_d: float
    hal_i: float
    hal_e: float
    hal_b: float
    hal_t: float

    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, m) for m in METRICS)

    def as_row(self) -> dict:
        return asdict(self)


def count_loc(span: MethodSpan) -> int:
    return span.end_line - span.start_line + 1


def method_metrics(span: MethodSpan) -> MethodMetrics:
    g = build_cfg(span)
    h = halstead(span.significant)
    return MethodMetrics(
        file=span.file,
        method=span.name,
        start_line=span.start_line,
        loc=count_loc(span),
        vg=cyclomatic(g),
        evg=essential(g),
        ivg=design_complexity(g),
        hal_n=h.N,
        hal_v=h.V,
        hal_l=h.L,
        hal_d=h.D,
        hal_i=h.I,
        hal_e=h.E,
        hal_b=h.B,
        hal_t=h.T,
    )


def extract_source(source: str, file: str = "<source>") -> list[MethodMetrics]:
    try:
        tokens = tokenize(source)
    except ExtractionError as exc:
        exc.file = file
        raise
    spans = segment_methods(tokens, file)
    return [method_metrics(s) for s in spans]


def extract_file(path: str | Path, name: str | None = None) -> list[MethodMetrics]:
    """Extract one record per method in ``path``, ordered by start line.

    ``name`` overrides the file label stored in the records (normally the
    path relative to the corpus root).
    """
    label = name if name is not None else str(path)
    try:
        source = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ExtractionError(f"cannot read file: {exc}", None, label) from exc
    return extract_source(source, label)


__all__ = [
    "METRICS",
    "METHOD_CSV_HEADER",
    "ControlFlowGraph",
    "ExtractionError",
    "MethodMetrics",
    "MethodSpan",
    "Token",
    "build_cfg",
    "count_loc",
    "cyclomatic",
    "design_complexity",
    "essential",
    "extract_file",
    "extract_source",
    "halstead",
    "method_metrics",
    "segment_methods",
    "tokenize",
]
