"""Corpus-wide extraction driver."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .extract import ExtractionError, MethodMetrics, extract_file
from .io import DEFAULT_INCLUDE, scan_corpus


@dataclass
class CorpusResult:
    records: list[MethodMetrics] = field(default_factory=list)
    errors: list[tuple[str, str]] = field(default_factory=list)  # (file, message)
    files: list[str] = field(default_factory=list)


def _extract_one(args: tuple[str, str]) -> tuple[str, list[MethodMetrics] | None, str | None]:
    root, rel = args
    try:
        return rel, extract_file(os.path.join(root, rel), rel), None
    except ExtractionError as exc:
        return rel, None, str(exc)


def extract_corpus(
    root: str | Path,
    include: Sequence[str] = DEFAULT_INCLUDE,
    exclude: Sequence[str] = (),
    jobs: int = 1,
) -> CorpusResult:
    """Extract every matching file; failures are recorded, not raised.

    Results are merged in path order whatever the scheduling.
    """
    files = scan_corpus(root, include, exclude)
    work = [(str(root), rel) for rel in files]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_extract_one, work, chunksize=8))
    else:
        results = [_extract_one(w) for w in work]
    out = CorpusResult(files=files)
    for rel, recs, err in results:
        if err is not None:
            out.errors.append((rel, err))
        else:
            out.records.extend(recs)
    return out
