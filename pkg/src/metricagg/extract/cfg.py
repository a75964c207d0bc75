"""Statement-level control-flow graphs for method bodies.

Decision nodes are created for ``if``, ``while``, ``for``, ``do``, every
``case`` label, every ``catch``, the ternary ``?:`` and each short-circuit
``&&`` / ``||``.  Short-circuit operators and ternaries become small diamonds
in front of the statement that evaluates them.  Lambda bodies, anonymous and
local class bodies are inlined at the point where they appear; a ``return``
inside them continues after the inlined body.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .lexer import ExtractionError, Token
from .methods import MethodSpan, is_call, is_constructor_call, match_backward, match_forward

DECISION_KINDS = ("if", "while", "for", "do", "case", "catch", "ternary", "and", "or")


@dataclass
class Node:
    id: int
    kind: str  # entry | exit | block | decision
    decision: str | None = None
    calls: list[str] = field(default_factory=list)
    line: int | None = None


@dataclass
class ControlFlowGraph:
    nodes: dict[int, Node]
    succ: dict[int, list[int]]
    entry: int
    exit: int

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return sum(len(v) for v in self.succ.values())

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in sorted(self.succ) for b in self.succ[a]]

    def preds(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {n: [] for n in self.nodes}
        for a, b in self.edges():
            out[b].append(a)
        return out

    def decisions(self) -> list[Node]:
        return [n for n in self.nodes.values() if n.kind == "decision"]

    def has_calls(self, n: int) -> bool:
        return bool(self.nodes[n].calls)

    def validate(self) -> None:
        """Check single entry/exit, reachability both ways and E - N + 2 >= 1."""
        if self.nodes[self.entry].kind != "entry" or self.nodes[self.exit].kind != "exit":
            raise ValueError("graph must have one entry and one exit")
        if self.succ[self.exit]:
            raise ValueError("exit node has successors")
        seen = _reach(self.succ, self.entry)
        if seen != set(self.nodes):
            raise ValueError(f"unreachable nodes: {sorted(set(self.nodes) - seen)}")
        back = _reach(_reverse(self.succ), self.exit)
        if back != set(self.nodes):
            raise ValueError(f"nodes cannot reach exit: {sorted(set(self.nodes) - back)}")
        for n, node in self.nodes.items():
            if node.kind in ("entry", "block") and len(self.succ[n]) != 1:
                raise ValueError(f"non-decision node {n} has {len(self.succ[n])} successors")
        if self.n_edges - self.n_nodes + 2 < 1:
            raise ValueError("E - N + 2 < 1")


def _reach(succ: dict[int, list[int]], root: int) -> set[int]:
    seen = {root}
    stack = [root]
    while stack:
        for m in succ[stack.pop()]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return seen


def _reverse(succ: dict[int, list[int]]) -> dict[int, list[int]]:
    rev: dict[int, list[int]] = {n: [] for n in succ}
    for a, bs in succ.items():
        for b in bs:
            rev[b].append(a)
    return rev


@dataclass(frozen=True)
class _Targets:
    ret: int
    brk: int | None = None
    cont: int | None = None
    yld: int | None = None
    labels: tuple[tuple[str, int, int | None], ...] = ()

    def label(self, name: str) -> tuple[int, int | None] | None:
        for lbl, brk, cont in reversed(self.labels):
            if lbl == name:
                return brk, cont
        return None

    def with_label(self, name: str | None, brk: int, cont: int | None) -> _Targets:
        if name is None:
            return self
        return replace(self, labels=self.labels + ((name, brk, cont),))


_DECL_WORDS = frozenset({"class", "interface", "enum", "record"})


class _Builder:
    def __init__(self, sig: list[Token]):
        self.sig = sig
        self.nodes: dict[int, Node] = {}
        self.succ: dict[int, list[int]] = {}

    # -- graph primitives -------------------------------------------------
    def node(self, kind: str = "block", decision: str | None = None, line: int | None = None) -> int:
        nid = len(self.nodes)
        self.nodes[nid] = Node(nid, kind, decision, [], line)
        self.succ[nid] = []
        return nid

    def edge(self, a: int | None, b: int) -> None:
        if a is not None:
            self.succ[a].append(b)

    def decision(self, kind: str, cur: int | None, line: int) -> int:
        d = self.node("decision", kind, line)
        self.edge(cur, d)
        return d

    def arm(self, d: int) -> int:
        a = self.node(line=self.nodes[d].line)
        self.edge(d, a)
        return a

    def join(self, *ends: int | None) -> int:
        j = self.node()
        for e in ends:
            self.edge(e, j)
        return j

    def ensure(self, cur: int | None) -> int:
        return cur if cur is not None else self.node()

    # -- token helpers ----------------------------------------------------
    def text(self, i: int) -> str:
        return self.sig[i].text if i < len(self.sig) else ""

    def expect(self, i: int, text: str) -> None:
        if self.text(i) != text:
            line = self.sig[min(i, len(self.sig) - 1)].line if self.sig else None
            raise ExtractionError(f"expected {text!r}, found {self.text(i)!r}", line)

    def group_end(self, i: int) -> int:
        return match_forward(self.sig, i)

    def top_level(self, lo: int, hi: int):
        """Yield indices in ``[lo, hi)`` not nested in (), [] or {}."""
        i = lo
        while i < hi:
            yield i
            if self.sig[i].kind == "punctuation" and self.sig[i].text in "([{":
                i = self.group_end(i) + 1
            else:
                i += 1

    def is_ternary_q(self, i: int, lo: int) -> bool:
        if self.sig[i].text != "?":
            return False
        return i > lo and self.sig[i - 1].text not in ("<", ",")

    def find_ternary(self, lo: int, hi: int) -> tuple[int, int] | None:
        q = None
        depth = 0
        for i in self.top_level(lo, hi):
            t = self.sig[i].text
            if q is None:
                if self.is_ternary_q(i, lo):
                    q, depth = i, 1
            elif self.is_ternary_q(i, lo):
                depth += 1
            elif t == ":":
                depth -= 1
                if depth == 0:
                    return q, i
        return None

    def find_last(self, lo: int, hi: int, op: str) -> int | None:
        last = None
        for i in self.top_level(lo, hi):
            if self.sig[i].text == op and self.sig[i].kind == "operator":
                last = i
        return last

    # -- expressions ------------------------------------------------------
    def expr(self, lo: int, hi: int, cur: int | None, tg: _Targets) -> int | None:
        if lo >= hi:
            return cur
        tern = self.find_ternary(lo, hi)
        if tern is not None:
            q, c = tern
            cur = self.expr(lo, q, self.ensure(cur), tg)
            d = self.decision("ternary", cur, self.sig[q].line)
            a = self.expr(q + 1, c, self.arm(d), tg)
            b = self.expr(c + 1, hi, self.arm(d), tg)
            return self.join(a, b)
        for op, kind in (("||", "or"), ("&&", "and")):
            k = self.find_last(lo, hi, op)
            if k is not None:
                cur = self.expr(lo, k, self.ensure(cur), tg)
                d = self.decision(kind, cur, self.sig[k].line)
                r = self.expr(k + 1, hi, self.arm(d), tg)
                return self.join(r, d)
        return self.atom(lo, hi, cur, tg)

    def expr_list(self, lo: int, hi: int, cur: int | None, tg: _Targets) -> int | None:
        start = lo
        for i in self.top_level(lo, hi):
            if self.sig[i].text in (",", ";"):
                cur = self.expr(start, i, cur, tg)
                start = i + 1
        return self.expr(start, hi, cur, tg)

    def atom(self, lo: int, hi: int, cur: int | None, tg: _Targets) -> int | None:
        cur = self.ensure(cur)
        i = lo
        while i < hi:
            t = self.sig[i]
            if t.text == "switch" and t.kind == "keyword" and self.text(i + 1) == "(":
                pc = self.group_end(i + 1)
                cur = self.expr_list(i + 2, pc, cur, tg)
                if self.text(pc + 1) == "{":
                    bc = self.group_end(pc + 1)
                    cur = self.switch_body(pc + 2, bc, cur, tg, t.line, expression=True)
                    i = bc + 1
                else:
                    i = pc + 1
                cur = self.ensure(cur)
                continue
            if is_call(self.sig, i):
                self.nodes[cur].calls.append(t.text)
            elif t.kind == "punctuation" and t.text in "([":
                close = self.group_end(i)
                cur = self.ensure(self.expr_list(i + 1, close, cur, tg))
                i = close + 1
                continue
            elif t.kind == "punctuation" and t.text == "{":
                close = self.group_end(i)
                cur = self.nested_body(i + 1, close, cur, tg)
                i = close + 1
                continue
            i += 1
        return cur

    def nested_body(self, lo: int, hi: int, cur: int | None, tg: _Targets) -> int:
        after = self.node()
        inner = _Targets(ret=after)
        end = self.stmts(lo, hi, self.ensure(cur), inner)
        self.edge(end, after)
        return after

    # -- statements -------------------------------------------------------
    def stmts(self, lo: int, hi: int, cur: int | None, tg: _Targets) -> int | None:
        i = lo
        while i < hi:
            i, cur = self.stmt(i, hi, cur, tg)
        return cur

    def stmt_end(self, lo: int, hi: int) -> tuple[int, int]:
        """Return (end of expression, index of next statement)."""
        for i in self.top_level(lo, hi):
            t = self.sig[i]
            if t.text == ";":
                return i, i + 1
            if t.kind == "keyword" and t.text == "case" and i > lo:
                return i, i
            if t.text == "{" and self.is_decl_brace(lo, i):
                close = self.group_end(i)
                return close + 1, close + 1
        return hi, hi

    def is_decl_brace(self, lo: int, i: int) -> bool:
        if i == lo:
            return False
        prev = self.sig[i - 1]
        if prev.text == ")":
            return not is_constructor_call(self.sig, match_backward(self.sig, i - 1))
        if prev.kind == "identifier" or prev.text == ">":
            return any(
                self.sig[k].text in _DECL_WORDS and (self.sig[k].kind == "keyword" or k + 1 < i)
                for k in range(lo, i)
            )
        return False

    def paren(self, i: int) -> int:
        """Expect ``(`` at ``i``; return the index of its ``)``."""
        self.expect(i, "(")
        return self.group_end(i)

    def stmt(
        self, i: int, hi: int, cur: int | None, tg: _Targets, label: str | None = None
    ) -> tuple[int, int | None]:
        t = self.sig[i]
        text, line = t.text, t.line
        kw = t.kind == "keyword"
        if text == "{" and t.kind == "punctuation":
            close = self.group_end(i)
            if label is not None:
                after = self.node()
                end = self.stmts(i + 1, close, cur, tg.with_label(label, after, None))
                self.edge(end, after)
                return close + 1, after
            return close + 1, self.stmts(i + 1, close, cur, tg)
        if text == ";":
            return i + 1, cur
        if kw and text == "if":
            pc = self.paren(i + 1)
            cur = self.expr(i + 2, pc, self.ensure(cur), tg)
            d = self.decision("if", cur, line)
            j, a = self.stmt(pc + 1, hi, self.arm(d), tg)
            if j < hi and self.text(j) == "else":
                j, b = self.stmt(j + 1, hi, self.arm(d), tg)
                return j, self.join(a, b)
            return j, self.join(a, d)
        if kw and text == "else":
            raise ExtractionError("'else' without 'if'", line)
        if kw and text in ("catch", "finally"):
            raise ExtractionError(f"'{text}' without 'try'", line)
        if kw and text == "case":
            raise ExtractionError("'case' outside switch", line)
        if kw and text == "while":
            pc = self.paren(i + 1)
            head = self.join(cur)
            after = self.node()
            c = self.expr(i + 2, pc, head, tg)
            d = self.decision("while", c, line)
            body_tg = replace(tg, brk=after, cont=head).with_label(label, after, head)
            j, b = self.stmt(pc + 1, hi, self.arm(d), body_tg)
            self.edge(b, head)
            self.edge(d, after)
            return j, after
        if kw and text == "do":
            head = self.join(cur)
            after = self.node()
            cond = self.node()
            body_tg = replace(tg, brk=after, cont=cond).with_label(label, after, cond)
            j, b = self.stmt(i + 1, hi, head, body_tg)
            self.expect(j, "while")
            pc = self.paren(j + 1)
            self.edge(b, cond)
            c = self.expr(j + 2, pc, cond, tg)
            d = self.decision("do", c, self.sig[j].line)
            self.edge(d, head)
            self.edge(d, after)
            end = pc + 1
            if self.text(end) == ";":
                end += 1
            return end, after
        if kw and text == "for":
            return self.for_stmt(i, hi, cur, tg, label)
        if kw and text == "switch":
            pc = self.paren(i + 1)
            cur = self.expr(i + 2, pc, self.ensure(cur), tg)
            self.expect(pc + 1, "{")
            bc = self.group_end(pc + 1)
            if label is not None:
                tg = tg.with_label(label, -1, None)
            return bc + 1, self.switch_body(pc + 2, bc, cur, tg, line, label=label)
        if kw and text == "try":
            return self.try_stmt(i, hi, cur, tg)
        if kw and text in ("return", "throw"):
            end, nxt = self.stmt_end(i + 1, hi)
            cur = self.expr(i + 1, end, self.ensure(cur), tg)
            self.edge(cur, tg.ret)
            return nxt, None
        if kw and text in ("break", "continue"):
            j = i + 1
            target: int | None
            if self.sig[j].kind == "identifier" if j < hi else False:
                found = tg.label(self.sig[j].text)
                if found is None:
                    raise ExtractionError(f"unknown label {self.sig[j].text!r}", line)
                target = found[0] if text == "break" else found[1]
                j += 1
            else:
                target = tg.brk if text == "break" else tg.cont
            if target is None:
                raise ExtractionError(f"'{text}' outside loop", line)
            self.edge(cur, target)
            if self.text(j) == ";":
                j += 1
            return j, None
        if (
            text == "yield"
            and tg.yld is not None
            and self.text(i + 1) not in ("=", "(", ".", "[", "++", "--", ";")
        ):
            end, nxt = self.stmt_end(i + 1, hi)
            cur = self.expr(i + 1, end, self.ensure(cur), tg)
            self.edge(cur, tg.yld)
            return nxt, None
        if kw and text == "synchronized" and self.text(i + 1) == "(":
            pc = self.paren(i + 1)
            cur = self.expr(i + 2, pc, self.ensure(cur), tg)
            return self.stmt(pc + 1, hi, cur, tg)
        if t.kind == "identifier" and self.text(i + 1) == ":" and i + 2 < hi:
            return self.stmt(i + 2, hi, cur, tg, label=text)
        end, nxt = self.stmt_end(i, hi)
        return nxt, self.expr(i, end, cur, tg)

    def for_stmt(
        self, i: int, hi: int, cur: int | None, tg: _Targets, label: str | None
    ) -> tuple[int, int | None]:
        line = self.sig[i].line
        pc = self.paren(i + 1)
        semis = [k for k in self.top_level(i + 2, pc) if self.sig[k].text == ";"]
        after = self.node()
        if len(semis) >= 2:
            s1, s2 = semis[0], semis[1]
            cur = self.expr_list(i + 2, s1, self.ensure(cur), tg)
            head = self.join(cur)
            c = self.expr(s1 + 1, s2, head, tg)
            d = self.decision("for", c, line)
            update = self.node()
            body_tg = replace(tg, brk=after, cont=update).with_label(label, after, update)
            j, b = self.stmt(pc + 1, hi, self.arm(d), body_tg)
            self.edge(b, update)
            u = self.expr_list(s2 + 1, pc, update, tg)
            self.edge(u, head)
        else:
            colon = next((k for k in self.top_level(i + 2, pc) if self.sig[k].text == ":"), None)
            if colon is None:
                raise ExtractionError("malformed for header", line)
            cur = self.expr(colon + 1, pc, self.ensure(cur), tg)
            head = self.join(cur)
            d = self.decision("for", head, line)
            body_tg = replace(tg, brk=after, cont=head).with_label(label, after, head)
            j, b = self.stmt(pc + 1, hi, self.arm(d), body_tg)
            self.edge(b, head)
        self.edge(d, after)
        return j, after

    def try_stmt(self, i: int, hi: int, cur: int | None, tg: _Targets) -> tuple[int, int | None]:
        line = self.sig[i].line
        j = i + 1
        cur = self.ensure(cur)
        if self.text(j) == "(":
            pc = self.group_end(j)
            cur = self.expr_list(j + 1, pc, cur, tg)
            j = pc + 1
        self.expect(j, "{")
        body = (j + 1, self.group_end(j))
        j = body[1] + 1
        handlers: list[tuple[int, int]] = []
        while self.text(j) == "catch":
            pc = self.paren(j + 1)
            self.expect(pc + 1, "{")
            close = self.group_end(pc + 1)
            handlers.append((pc + 2, close))
            j = close + 1
        final = None
        if self.text(j) == "finally":
            self.expect(j + 1, "{")
            close = self.group_end(j + 1)
            final = (j + 2, close)
            j = close + 1
        if handlers:
            d = self.decision("catch", cur, line)
            ends = [self.stmts(body[0], body[1], self.arm(d), tg)]
            for lo, h in handlers:
                ends.append(self.stmts(lo, h, self.arm(d), tg))
            end: int | None = self.join(*ends)
        else:
            end = self.stmts(body[0], body[1], cur, tg)
        if final is not None:
            end = self.stmts(final[0], final[1], end if end is not None else None, tg)
        return j, end

    def label_end(self, i: int, hi: int) -> tuple[int, bool]:
        """Index of the ``:`` or ``->`` ending the label starting at ``i``."""
        for k in self.top_level(i + 1, hi):
            if self.sig[k].text in (":", "->"):
                return k, self.sig[k].text == "->"
        raise ExtractionError("malformed case label", self.sig[i].line)

    def is_label_start(self, i: int) -> bool:
        t = self.sig[i]
        if t.kind != "keyword":
            return False
        return t.text == "case" or (t.text == "default" and self.text(i + 1) in (":", "->"))

    def switch_body(
        self,
        lo: int,
        hi: int,
        cur: int | None,
        tg: _Targets,
        line: int,
        expression: bool = False,
        label: str | None = None,
    ) -> int:
        d = self.decision("case", self.ensure(cur), line)
        after = self.node()
        stg = replace(tg, brk=after, yld=after if expression else tg.yld)
        if label is not None:
            stg = replace(
                stg, labels=tuple(x if x[0] != label else (label, after, None) for x in stg.labels)
            )
        has_default = False
        flow: int | None = None
        i = lo
        if lo < hi and not self.is_label_start(lo):
            raise ExtractionError("switch body must start with a case label", self.sig[lo].line)
        while i < hi:
            if self.is_label_start(i):
                has_default = has_default or self.sig[i].text == "default"
                k, arrow = self.label_end(i, hi)
                entry = self.arm(d)
                if arrow:
                    if self.text(k + 1) == "{" or self.text(k + 1) == "throw":
                        i, end = self.stmt(k + 1, hi, entry, stg)
                    else:
                        e, i = self.stmt_end(k + 1, hi)
                        end = self.expr(k + 1, e, entry, stg)
                    self.edge(end, after)
                    flow = None
                else:
                    self.edge(flow, entry)
                    flow = entry
                    i = k + 1
                continue
            i, flow = self.stmt(i, hi, flow, stg)
        self.edge(flow, after)
        if not has_default:
            self.edge(d, after)
        return after


def _prune(nodes: dict[int, Node], succ: dict[int, list[int]], entry: int) -> None:
    keep = _reach(succ, entry)
    for n in list(nodes):
        if n not in keep:
            del nodes[n]
            del succ[n]


def build_cfg(span: MethodSpan) -> ControlFlowGraph:
    """Build the control-flow graph of a segmented method."""
    return build_cfg_from_tokens(span.significant, file=span.file)


def build_cfg_from_tokens(sig: list[Token], file: str | None = None) -> ControlFlowGraph:
    b = _Builder(sig)
    entry = b.node("entry")
    exit_ = b.node("exit")
    first = b.node()
    b.edge(entry, first)
    try:
        end = b.stmts(0, len(sig), first, _Targets(ret=exit_))
    except ExtractionError as exc:
        exc.file = exc.file or file
        raise
    except IndexError as exc:
        line = sig[-1].line if sig else None
        raise ExtractionError("malformed method body", line, file) from exc
    b.edge(end, exit_)
    _prune(b.nodes, b.succ, entry)
    g = ControlFlowGraph(b.nodes, b.succ, entry, exit_)
    try:
        if exit_ not in b.nodes:
            raise ValueError("exit is unreachable")
        g.validate()
    except ValueError as exc:
        raise ExtractionError(f"malformed control flow: {exc}", sig[0].line if sig else None, file) from exc
    return g


def decision_outcomes(g: ControlFlowGraph) -> int:
    """Sum over decision nodes of (outcomes - 1)."""
    return sum(max(len(g.succ[d.id]) - 1, 0) for d in g.decisions())
