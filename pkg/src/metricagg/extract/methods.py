"""Segment a token stream into method bodies."""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import ExtractionError, Token

_CLASS_WORDS = frozenset({"class", "interface", "enum", "struct", "union", "new"})
_OPEN = {"(": ")", "[": "]", "{": "}"}
_CLOSE = {v: k for k, v in _OPEN.items()}


@dataclass
class MethodSpan:
    file: str
    name: str
    start_line: int
    end_line: int
    body_tokens: list[Token] = field(repr=False)
    callees: list[str] = field(default_factory=list)

    @property
    def significant(self) -> list[Token]:
        return [t for t in self.body_tokens if t.significant]


def match_forward(sig: list[Token], i: int) -> int:
    """Index of the delimiter closing ``sig[i]`` (an opener)."""
    depth = 0
    for j in range(i, len(sig)):
        text = sig[j].text
        if sig[j].kind != "punctuation":
            continue
        if text in _OPEN:
            depth += 1
        elif text in _CLOSE:
            depth -= 1
            if depth == 0:
                return j
    raise ExtractionError(f"unbalanced {sig[i].text!r}", sig[i].line)


def match_backward(sig: list[Token], j: int) -> int:
    """Index of the opener matching the closer ``sig[j]``."""
    depth = 0
    for i in range(j, -1, -1):
        text = sig[i].text
        if sig[i].kind != "punctuation":
            continue
        if text in _CLOSE:
            depth += 1
        elif text in _OPEN:
            depth -= 1
            if depth == 0:
                return i
    raise ExtractionError(f"unbalanced {sig[j].text!r}", sig[j].line)


def check_braces(sig: list[Token]) -> None:
    stack: list[Token] = []
    for tok in sig:
        if tok.kind != "punctuation":
            continue
        if tok.text == "{":
            stack.append(tok)
        elif tok.text == "}":
            if not stack:
                raise ExtractionError("unbalanced '}'", tok.line)
            stack.pop()
    if stack:
        raise ExtractionError("unclosed '{'", stack[0].line)


def _skip_qualified_name_back(sig: list[Token], i: int) -> int:
    """Walk back over ``a.b.C<T>`` ending at ``i``; return index before it."""
    while i >= 0:
        t = sig[i]
        if t.kind == "identifier" or t.text == ".":
            i -= 1
        elif t.text == ">":
            depth = 0
            while i >= 0:
                if sig[i].text == ">":
                    depth += 1
                elif sig[i].text == ">>":
                    depth += 2
                elif sig[i].text == "<":
                    depth -= 1
                i -= 1
                if depth <= 0:
                    break
        else:
            break
    return i


def is_constructor_call(sig: list[Token], paren: int) -> bool:
    """True when the ``(`` at ``paren`` belongs to ``new Type(...)``."""
    i = _skip_qualified_name_back(sig, paren - 1)
    return i >= 0 and sig[i].text == "new"


def is_call(sig: list[Token], i: int) -> bool:
    """True when ``sig[i]`` is the name of a method or constructor invocation."""
    if sig[i].kind != "identifier" or i + 1 >= len(sig) or sig[i + 1].text != "(":
        return False
    if is_constructor_call(sig, i + 1):
        return True
    close = match_forward(sig, i + 1)
    nxt = sig[close + 1].text if close + 1 < len(sig) else ""
    # ``name(...) {`` or ``name(...) throws`` is a declaration.
    return nxt not in ("{", "throws")


def callees(sig: list[Token]) -> list[str]:
    return [sig[i].text for i in range(len(sig)) if is_call(sig, i)]


def _method_paren_close(sig: list[Token], brace: int, lo: int) -> int | None:
    j = brace - 1
    while j >= lo and sig[j].text == "const":
        j -= 1
    if j >= lo and sig[j].text == ")":
        return j
    # throws clause: ``) throws A, b.C {``
    while j >= lo and (sig[j].kind == "identifier" or sig[j].text in (".", ",")):
        j -= 1
    if j > lo and sig[j].text == "throws" and sig[j - 1].text == ")":
        return j - 1
    return None


def _header_start(sig: list[Token], lo: int, hi: int) -> int:
    """First header token in ``sig[lo:hi]`` after leading annotations."""
    i = lo
    while i < hi and sig[i].text == "@" and i + 1 < hi and sig[i + 1].kind == "identifier":
        i += 2
        while i + 1 < hi and sig[i].text == "." and sig[i + 1].kind == "identifier":
            i += 2
        if i < hi and sig[i].text == "(":
            i = match_forward(sig, i) + 1
    return min(i, hi)


def segment_methods(tokens: list[Token], file: str = "<source>") -> list[MethodSpan]:
    """Find method definitions at top level or directly inside type bodies.

    Bodies of lambdas, anonymous and local classes nested inside a method
    belong to that method.
    """
    sig = [t for t in tokens if t.significant]
    try:
        check_braces(sig)
    except ExtractionError as exc:
        exc.file = file
        raise
    # Map significant-token positions back to the full token list.
    sig_pos = [k for k, t in enumerate(tokens) if t.significant]
    spans: list[MethodSpan] = []

    def scan(lo: int, hi: int) -> None:
        """Scan a container body ``sig[lo:hi]`` for members."""
        boundary = lo
        i = lo
        while i < hi:
            t = sig[i]
            if t.kind == "punctuation" and t.text in ("(", "["):
                i = match_forward(sig, i) + 1
                continue
            if t.text == ";" or t.text == "}":
                boundary = i + 1
                i += 1
                continue
            if t.text != "{":
                i += 1
                continue
            close = match_forward(sig, i)
            header = sig[boundary:i]
            words = {h.text for h in header}
            paren_close = _method_paren_close(sig, i, boundary)
            name_tok = None
            if paren_close is not None:
                paren_open = match_backward(sig, paren_close)
                cand = paren_open - 1
                if (
                    cand >= boundary
                    and sig[cand].kind == "identifier"
                    and not is_constructor_call(sig, paren_open)
                ):
                    name_tok = sig[cand]
            if name_tok is not None:
                start = _header_start(sig, boundary, i)
                body = tokens[sig_pos[i] + 1 : sig_pos[close]]
                body_sig = [b for b in body if b.significant]
                spans.append(
                    MethodSpan(
                        file=file,
                        name=name_tok.text,
                        start_line=sig[start].line,
                        end_line=sig[close].line,
                        body_tokens=body,
                        callees=callees(body_sig),
                    )
                )
            elif words & _CLASS_WORDS or ("record" in words and "=" not in words):
                scan(i + 1, close)
            elif "=" in words or "->" in words:
                pass  # initializer or lambda outside any method
            else:
                scan(i + 1, close)
            boundary = close + 1
            i = close + 1

    scan(0, len(sig))
    spans.sort(key=lambda s: s.start_line)
    return spans
