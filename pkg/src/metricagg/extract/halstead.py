"""Halstead operator/operand counting.

Counting table:

* operators: every operator and punctuation token except the closing
  delimiters ``)``, ``]`` and ``}`` (a pair is counted once, via its opener),
  every keyword except ``this`` and ``super``, plus one implicit method
  delimiter per method;
* operands: identifiers, literals, ``this`` and ``super``.

Comments and whitespace are ignored.  Only tokens strictly inside the method
body braces are counted.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .lexer import Token

METHOD_DELIMITER = "<method>"
_CLOSERS = frozenset({")", "]", "}"})
_OPERAND_KEYWORDS = frozenset({"this", "super"})


@dataclass(frozen=True)
class HalsteadCounts:
    n1: int  # distinct operators
    n2: int  # distinct operands
    N1: int  # total operators
    N2: int  # total operands


@dataclass(frozen=True)
class HalsteadMetrics:
    N: float
    V: float
    L: float
    D: float
    I: float  # noqa: E741
    E: float
    B: float
    T: float


def classify(tokens: list[Token]) -> tuple[Counter, Counter]:
    """Split ``tokens`` into operator and operand occurrence counters."""
    operators: Counter = Counter({METHOD_DELIMITER: 1})
    operands: Counter = Counter()
    for t in tokens:
        if t.kind in ("identifier", "literal") or (t.kind == "keyword" and t.text in _OPERAND_KEYWORDS):
            operands[t.text] += 1
        elif t.kind == "keyword" or (t.kind in ("operator", "punctuation") and t.text not in _CLOSERS):
            operators[t.text] += 1
    return operators, operands


def count(tokens: list[Token]) -> HalsteadCounts:
    ops, opnds = classify(tokens)
    return HalsteadCounts(len(ops), len(opnds), sum(ops.values()), sum(opnds.values()))


def from_counts(c: HalsteadCounts) -> HalsteadMetrics:
    """Derive the eight Halstead measures from the four base counts.

    With no operands the difficulty is taken as 0 and the level as 1, so the
    effort, time and content follow as E = T = 0 and I = V.
    """
    length = c.N1 + c.N2
    vocabulary = c.n1 + c.n2
    volume = length * math.log2(vocabulary) if vocabulary > 0 else 0.0
    if c.n2 == 0:
        difficulty, level = 0.0, 1.0
    else:
        difficulty = (c.n1 / 2) * (c.N2 / c.n2)
        level = 1.0 / difficulty
    effort = difficulty * volume
    return HalsteadMetrics(
        N=float(length),
        V=volume,
        L=level,
        D=difficulty,
        I=level * volume,
        E=effort,
        B=volume / 3000,
        T=effort / 18,
    )


def halstead(tokens: list[Token]) -> HalsteadMetrics:
    return from_counts(count(tokens))
