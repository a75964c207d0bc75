"""Synthetic corpus generator for desk-scale runs of the study.

Files hold a shifted-geometric number of methods.  Method sizes are
log-normal (a common fit for software size distributions).  Every file
draws its own complexity factor, so v(G) per line of code varies between
files; within a file v(G) is a noisy linear function of LOC.  Halstead
values come from operator/operand counts that grow with LOC, and defect
counts are Poisson with a rate proportional to the file's total LOC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..extract import MethodMetrics
from ..extract.halstead import HalsteadCounts, from_counts


@dataclass(frozen=True)
class SynthParams:
    files: int = 200
    method_p: float = 0.15  # geometric success probability, mean 1/p methods per file
    loc_mu: float = 2.5  # log-normal location of method LOC
    loc_sigma: float = 0.9  # log-normal scale of method LOC
    vg_per_loc: float = 0.15  # decisions per line at the median file
    complexity_sigma: float = 0.4  # spread of the per-file complexity factor (log scale)
    vg_noise: float = 0.15  # per-method multiplicative noise on v(G) (log scale)
    tokens_per_loc: float = 6.0
    defects_per_file: float = 0.8  # mean Poisson rate at the mean file size

    def validate(self) -> None:
        if self.files < 1:
            raise ValueError("files must be positive")
        if not 0 < self.method_p <= 1:
            raise ValueError("method_p must lie in (0, 1]")
        for name in ("loc_sigma", "complexity_sigma", "vg_noise"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("vg_per_loc", "tokens_per_loc", "defects_per_file"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class SynthCorpus:
    methods: list[MethodMetrics]
    bugs: dict[str, int]


def _halstead_counts(rng: np.random.Generator, loc: int, tokens_per_loc: float) -> HalsteadCounts:
    length = max(2, int(round(loc * tokens_per_loc * rng.lognormal(0.0, 0.2))))
    N1 = max(1, int(round(length * 0.55)))
    N2 = max(1, length - N1)
    n1 = max(1, min(N1, int(round(4 + 2.5 * math.log2(N1 + 1)))))
    n2 = max(1, min(N2, int(round(N2**0.7))))
    return HalsteadCounts(n1, n2, N1, N2)


def synth_corpus(params: SynthParams, seed: int) -> SynthCorpus:
    params.validate()
    rng = np.random.default_rng(seed)
    width = len(str(params.files))
    methods: list[MethodMetrics] = []
    totals: dict[str, int] = {}
    for f in range(params.files):
        name = f"src/F{f + 1:0{width}d}.java"
        n_methods = int(rng.geometric(params.method_p))
        factor = params.vg_per_loc * rng.lognormal(0.0, params.complexity_sigma)
        locs = np.maximum(1, np.rint(rng.lognormal(params.loc_mu, params.loc_sigma, n_methods))).astype(int)
        line = 3
        for m, loc in enumerate(locs):
            vg = max(1, int(round(1 + factor * loc * rng.lognormal(0.0, params.vg_noise))))
            evg = 1 if rng.random() < 0.7 else int(rng.integers(1, vg + 1))
            ivg = int(rng.binomial(vg - 1, 0.6)) + 1
            h = from_counts(_halstead_counts(rng, int(loc), params.tokens_per_loc))
            methods.append(
                MethodMetrics(
                    file=name,
                    method=f"m{m + 1}",
                    start_line=line,
                    loc=int(loc),
                    vg=vg,
                    evg=evg,
                    ivg=ivg,
                    hal_n=h.N,
                    hal_v=h.V,
                    hal_l=h.L,
                    hal_d=h.D,
                    hal_i=h.I,
                    hal_e=h.E,
                    hal_b=h.B,
                    hal_t=h.T,
                )
            )
            line += int(loc) + 1
        totals[name] = int(locs.sum())
    mean_size = sum(totals.values()) / len(totals)
    bugs = {f: int(rng.poisson(params.defects_per_file * s / mean_size)) for f, s in totals.items()}
    return SynthCorpus(methods, bugs)
