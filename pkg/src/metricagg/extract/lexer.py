"""Lossless lexer for a brace-delimited C/Java-like language."""

from __future__ import annotations

import re
from dataclasses import dataclass

KEYWORDS = frozenset(
    """
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for if implements
    import instanceof int interface long native new package private protected
    public return short static strictfp super switch synchronized this throw
    throws transient try void volatile while
    struct union typedef sizeof unsigned signed extern register auto inline
    """.split()
)

LITERAL_WORDS = frozenset({"true", "false", "null", "NULL", "nullptr"})

# Longest first so that the alternation is greedy.
OPERATORS = sorted(
    """
    >>>= <<= >>= >>> ... -> :: ++ -- && || == != <= >= += -= *= /= %= &= |= ^=
    << >> = + - * / % & | ^ ! ~ < > ? : . @ #
    """.split(),
    key=len,
    reverse=True,
)
PUNCTUATION = frozenset("(){}[];,")

_NUMBER = r"""
    0[xX][0-9a-fA-F_]+[lLuU]*
  | 0[bB][01_]+[lLuU]*
  | (?:[0-9][0-9_]*\.?[0-9_]*|\.[0-9][0-9_]*)(?:[eE][+-]?[0-9]+)?[fFdDlLuU]*
"""
_TOKEN_RE = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*)
  | (?P<text_block>\"\"\")
  | (?P<string>")
  | (?P<char>')
  | (?P<number>{_NUMBER})
  | (?P<word>(?:[^\W\d]|\$)(?:\w|\$)*)
  | (?P<op>{"|".join(re.escape(op) for op in OPERATORS)})
  | (?P<punct>[(){{}}\[\];,])
    """,
    re.VERBOSE,
)


class ExtractionError(Exception):
    """Raised when a source file cannot be lexed, segmented or analysed."""

    def __init__(self, message: str, line: int | None = None, file: str | None = None):
        self.message = message
        self.line = line
        self.file = file
        super().__init__(str(self))

    def __str__(self) -> str:
        where = self.file or "<source>"
        if self.line is not None:
            where = f"{where}:{self.line}"
        return f"{where}: {self.message}"


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | identifier | operator | literal | punctuation | comment | whitespace
    text: str
    line: int

    @property
    def significant(self) -> bool:
        return self.kind not in ("comment", "whitespace")


def _scan_quoted(source: str, start: int, quote: str, line: int) -> int:
    """Return the index just past the closing quote of a string/char literal."""
    i = start + 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\\":
            i += 2
            continue
        if c == quote:
            return i + 1
        if c == "\n":
            break
        i += 1
    kind = "string" if quote == '"' else "character"
    raise ExtractionError(f"unterminated {kind} literal", line)


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens whose texts concatenate back to ``source``."""
    tokens: list[Token] = []
    pos = 0
    line = 1
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExtractionError(f"unexpected character {source[pos]!r}", line)
        group = m.lastgroup
        if group == "block_comment":
            close = source.find("*/", pos + 2)
            if close < 0:
                raise ExtractionError("unterminated block comment", line)
            end, kind = close + 2, "comment"
        elif group == "text_block":
            close = source.find('"""', pos + 3)
            if close < 0:
                raise ExtractionError("unterminated text block", line)
            end, kind = close + 3, "literal"
        elif group in ("string", "char"):
            end, kind = _scan_quoted(source, pos, source[pos], line), "literal"
        else:
            end = m.end()
            kind = {
                "ws": "whitespace",
                "line_comment": "comment",
                "number": "literal",
                "op": "operator",
                "punct": "punctuation",
            }.get(group, "")
            if group == "word":
                word = m.group()
                if word == "goto":
                    raise ExtractionError("goto is not supported", line)
                if word in KEYWORDS:
                    kind = "keyword"
                elif word in LITERAL_WORDS:
                    kind = "literal"
                else:
                    kind = "identifier"
        text = source[pos:end]
        tokens.append(Token(kind, text, line))
        line += text.count("\n")
        pos = end
    return tokens


def detokenize(tokens: list[Token]) -> str:
    return "".join(t.text for t in tokens)
