"""Command line interface.

Exit status: 0 on success, 1 when the run fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path
from typing import Sequence

from .config import CONFIG_KEYS, ConfigError, RunConfig, load_config
from .corpus import extract_corpus
from .extract import ExtractionError
from .filtering import one_level_filter, two_level_filter
from .io import (
    InputError,
    atomic_write,
    files_to_csv,
    method_matrix,
    methods_to_csv,
    parse_methods,
    read_defects,
    sha256_bytes,
    sha256_file,
)
from .matrix import aggregate_matrix
from .study import ANALYSES, build_dataset, run_bundle
from .study.rq import StudyConfig
from .study.synth import SynthParams, synth_corpus

log = logging.getLogger("metricagg")


class UsageError(Exception):
    pass


def _corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--root", help="corpus root directory")
    p.add_argument("--include", action="append", metavar="GLOB", help="include pattern (repeatable)")
    p.add_argument("--exclude", action="append", metavar="GLOB", help="exclude pattern (repeatable)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for extraction")


def _filter_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cluster-threshold", dest="cluster_threshold", type=float, help="|rho| cut (default 0.7)")
    p.add_argument("--redundancy-cutoff", dest="redundancy_cutoff", type=float, help="adjusted R^2 cutoff (default 0.9)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metricagg", description="Method-level metrics, aggregation and defect models.")
    parser.add_argument("--config", help="key = value configuration file; flags override it")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract method-level metrics to CSV")
    _corpus_args(p)
    p.add_argument("-o", "--output", help="output CSV (default stdout)")

    p = sub.add_parser("aggregate", help="aggregate a method CSV to file level")
    p.add_argument("-i", "--input", help="method CSV (default stdin)")
    p.add_argument("--defects", help="file,bugs CSV to join")
    p.add_argument("-o", "--output", help="output CSV (default stdout)")

    p = sub.add_parser("filter", help="filter predictors of a method CSV")
    p.add_argument("-i", "--input", help="method CSV (default stdin)")
    p.add_argument("--mode", choices=("one", "two"), default="one", help="one-level or two-level filtering")
    p.add_argument("--format", choices=("json", "table"), default="json")
    _filter_args(p)
    p.add_argument("-o", "--output", help="output file (default stdout)")

    p = sub.add_parser("study", help="run the analyses and write a report bundle")
    p.add_argument("analysis", choices=ANALYSES + ("all",))
    p.add_argument("-i", "--input", help="method CSV, optionally with a bugs column (default stdin)")
    _corpus_args(p)
    p.add_argument("--defects", help="file,bugs CSV")
    p.add_argument("--seed", type=int, help="master seed (required for rq3 and all)")
    p.add_argument("--k", type=int, help="folds (default 10)")
    p.add_argument("--repetitions", type=int, help="cross-validation repetitions (default 10)")
    p.add_argument("--no-stratified", dest="stratified", action="store_const", const=False, help="plain folds for logistic models")
    p.add_argument("--log1p-response", dest="log1p_response", action="store_const", const=True, help="fit linear models to log(1 + bugs)")
    _filter_args(p)
    p.add_argument("--out", help="report directory (default ./report)")
    p.add_argument("--name", default="dataset", help="dataset label used in reports and seeding")
    p.add_argument("-q", "--quiet", action="store_true", help="do not print tables")

    p = sub.add_parser("synth", help="generate a synthetic method CSV with a bugs column")
    p.add_argument("--files", type=int, default=SynthParams.files)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--method-p", dest="method_p", type=float, default=SynthParams.method_p)
    p.add_argument("--loc-mu", dest="loc_mu", type=float, default=SynthParams.loc_mu)
    p.add_argument("--loc-sigma", dest="loc_sigma", type=float, default=SynthParams.loc_sigma)
    p.add_argument("--vg-per-loc", dest="vg_per_loc", type=float, default=SynthParams.vg_per_loc)
    p.add_argument("--complexity-sigma", dest="complexity_sigma", type=float, default=SynthParams.complexity_sigma)
    p.add_argument("--vg-noise", dest="vg_noise", type=float, default=SynthParams.vg_noise)
    p.add_argument("--defects-per-file", dest="defects_per_file", type=float, default=SynthParams.defects_per_file)
    p.add_argument("-o", "--output", help="output CSV (default stdout)")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then command line flags."""
    values = {}
    if args.config:
        values.update(load_config(args.config))
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    cfg = RunConfig(**{f.name: values[f.name] for f in fields(RunConfig) if f.name in values})
    cfg.validate()
    return cfg


def _emit(text: str, output: str | None) -> None:
    if output:
        atomic_write(output, text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _read_input(path: str | None) -> tuple[str, str]:
    if path in (None, "-"):
        return sys.stdin.read(), "<stdin>"
    return Path(path).read_text(encoding="utf-8"), path


def cmd_extract(args, cfg: RunConfig) -> int:
    if not cfg.root:
        raise UsageError("extract needs --root")
    result = extract_corpus(cfg.root, cfg.include, cfg.exclude, args.jobs)
    for f, msg in result.errors:
        print(f"warning: skipped {f}: {msg}", file=sys.stderr)
    _emit(methods_to_csv(result.records), args.output)
    return 0


def _load_methods(args, cfg: RunConfig, inputs: list):
    """Method records and bug counts from --root or a method CSV."""
    if getattr(args, "root", None) or (cfg.root and not getattr(args, "input", None)):
        result = extract_corpus(cfg.root, cfg.include, cfg.exclude, getattr(args, "jobs", 1))
        for f, msg in result.errors:
            print(f"warning: skipped {f}: {msg}", file=sys.stderr)
        records, bugs = result.records, None
        for rel in result.files:
            inputs.append((rel, sha256_file(Path(cfg.root) / rel)))
    else:
        text, label = _read_input(getattr(args, "input", None))
        records, bugs = parse_methods(text, label)
        inputs.append((label, sha256_bytes(text.encode("utf-8"))))
    if cfg.defects:
        bugs = {r.file: r.bugs for r in read_defects(cfg.defects)}
        inputs.append((cfg.defects, sha256_file(cfg.defects)))
    return records, bugs


def cmd_aggregate(args, cfg: RunConfig) -> int:
    records, bugs = _load_methods(args, cfg, [])
    if not records:
        raise InputError("no method records", None, args.input or "<stdin>")
    if bugs is not None:
        d = build_dataset("aggregate", records, bugs)
        _emit(files_to_csv(d.files, d.bugs), args.output)
    else:
        m, groups = method_matrix(records)
        _emit(files_to_csv(aggregate_matrix(m, groups)), args.output)
    return 0


def cmd_filter(args, cfg: RunConfig) -> int:
    records, _ = _load_methods(args, cfg, [])
    if not records:
        raise InputError("no method records", None, args.input or "<stdin>")
    m, groups = method_matrix(records)
    if args.mode == "one":
        report = one_level_filter(aggregate_matrix(m, groups), cfg.cluster_threshold, cfg.redundancy_cutoff)
    else:
        report = two_level_filter(m, groups, cfg.cluster_threshold, cfg.redundancy_cutoff)
    _emit(report.to_json() if args.format == "json" else report.table(), args.output)
    return 0


def cmd_study(args, cfg: RunConfig) -> int:
    which = ANALYSES if args.analysis == "all" else (args.analysis,)
    if "rq3" in which and cfg.seed is None:
        raise UsageError(f"study {args.analysis} needs an explicit --seed")
    inputs: list[tuple[str, str]] = []
    records, bugs = _load_methods(args, cfg, inputs)
    if bugs is None:
        raise UsageError("no defect data: pass --defects or a method CSV with a bugs column")
    d = build_dataset(args.name, records, bugs)
    scfg = StudyConfig(
        seed=cfg.seed if cfg.seed is not None else 0,
        k=cfg.k,
        repetitions=cfg.repetitions,
        stratified=cfg.stratified,
        cluster_threshold=cfg.cluster_threshold,
        redundancy_cutoff=cfg.redundancy_cutoff,
        log1p_response=cfg.log1p_response,
    )
    files, tables = run_bundle(d, scfg, which, inputs)
    out = Path(cfg.out)
    for name, text in files.items():
        atomic_write(out / name, text)
    if not args.quiet:
        for t in tables:
            sys.stdout.write(t.to_text() + "\n")
    print(f"wrote {len(files)} files to {out}", file=sys.stderr)
    return 0


def cmd_synth(args, cfg: RunConfig) -> int:
    params = SynthParams(
        files=args.files,
        method_p=args.method_p,
        loc_mu=args.loc_mu,
        loc_sigma=args.loc_sigma,
        vg_per_loc=args.vg_per_loc,
        complexity_sigma=args.complexity_sigma,
        vg_noise=args.vg_noise,
        defects_per_file=args.defects_per_file,
    )
    try:
        params.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    corpus = synth_corpus(params, args.seed)
    _emit(methods_to_csv(corpus.methods, corpus.bugs), args.output)
    return 0


COMMANDS = {
    "extract": cmd_extract,
    "aggregate": cmd_aggregate,
    "filter": cmd_filter,
    "study": cmd_study,
    "synth": cmd_synth,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        if exc.source == args.config:
            print(f"{parser.prog}: error: {exc}", file=sys.stderr)
            return 2
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ExtractionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
