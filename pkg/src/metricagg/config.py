"""Run configuration and the ``key = value`` config file format."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .filtering import CLUSTER_THRESHOLD, REDUNDANCY_CUTOFF
from .io import DEFAULT_INCLUDE, InputError


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    root: str | None = None
    include: list[str] = field(default_factory=lambda: list(DEFAULT_INCLUDE))
    exclude: list[str] = field(default_factory=list)
    defects: str | None = None
    cluster_threshold: float = CLUSTER_THRESHOLD
    redundancy_cutoff: float = REDUNDANCY_CUTOFF
    k: int = 10
    repetitions: int = 10
    stratified: bool = True
    log1p_response: bool = False
    out: str = "report"
    seed: int | None = None

    def validate(self, need_seed: bool = False) -> None:
        for name in ("cluster_threshold", "redundancy_cutoff"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ConfigError(f"{name} must lie in (0, 1), got {v}")
        if self.k < 2:
            raise ConfigError(f"k must be at least 2, got {self.k}")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be positive, got {self.repetitions}")
        if self.root is not None and not Path(self.root).is_dir():
            raise ConfigError(f"corpus root not found: {self.root}")
        if need_seed and self.seed is None:
            raise ConfigError("an explicit --seed is required")


CONFIG_KEYS = {f.name for f in fields(RunConfig)}
_LIST_KEYS = {"include", "exclude"}
_BOOL_KEYS = {"stratified", "log1p_response"}


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    List keys take comma-separated values.  Unknown keys are errors.
    """
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError("expected key = value", lineno, source)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise InputError(f"unknown key {key!r}", lineno, source)
        try:
            if key in _LIST_KEYS:
                out[key] = [v.strip() for v in value.split(",") if v.strip()]
            elif key in _BOOL_KEYS:
                out[key] = parse_bool(value)
            elif key in ("k", "repetitions", "seed"):
                out[key] = int(value)
            elif key in ("cluster_threshold", "redundancy_cutoff"):
                out[key] = float(value)
            else:
                out[key] = value
        except ValueError as exc:
            raise InputError(str(exc), lineno, source) from None
    return out


def load_config(path: str | Path) -> dict:
    return parse_config(Path(path).read_text(encoding="utf-8"), str(path))
