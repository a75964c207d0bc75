"""McCabe cyclomatic, essential and module design complexity."""

from __future__ import annotations

from collections import Counter

from .cfg import ControlFlowGraph, _reach


def cyclomatic(g: ControlFlowGraph) -> int:
    return g.n_edges - g.n_nodes + 2


class _Reducer:
    """Mutable multigraph used by the reductions."""

    def __init__(self, g: ControlFlowGraph):
        self.succ = {n: list(s) for n, s in g.succ.items()}
        self.calls = {n: bool(node.calls) for n, node in g.nodes.items()}
        self.entry, self.exit = g.entry, g.exit
        self.indeg: Counter = Counter()
        for s in self.succ.values():
            self.indeg.update(s)

    def v(self) -> int:
        return sum(len(s) for s in self.succ.values()) - len(self.succ) + 2

    def _set_succ(self, n: int, new: list[int]) -> None:
        self.indeg.subtract(self.succ[n])
        self.indeg.update(new)
        self.succ[n] = new

    def dedupe(self, n: int) -> bool:
        s = self.succ[n]
        uniq = list(dict.fromkeys(s))
        if len(uniq) == len(s):
            return False
        self._set_succ(n, uniq)
        return True

    def drop_self_loop(self, n: int) -> bool:
        s = self.succ[n]
        if n in s and any(m != n for m in s):
            self._set_succ(n, [m for m in s if m != n])
            return True
        return False

    def bypass(self, n: int) -> bool:
        """Replace a single-in single-out node by an edge."""
        if n in (self.entry, self.exit) or len(self.succ[n]) != 1 or self.indeg[n] != 1:
            return False
        (s,) = self.succ[n]
        if s == n:
            return False
        p = next(m for m, ss in self.succ.items() if n in ss)
        ps = list(self.succ[p])
        ps[ps.index(n)] = s
        self._set_succ(p, ps)
        self._set_succ(n, [])
        del self.succ[n]
        return True

    def merge_forward(self, n: int) -> bool:
        """Merge ``n``'s sole successor into ``n`` when ``n`` is its sole predecessor."""
        if len(self.succ[n]) != 1:
            return False
        (s,) = self.succ[n]
        if s == n or s == self.exit or self.indeg[s] != 1:
            return False
        out = self.succ[s]
        self._set_succ(s, [])
        del self.succ[s]
        self._set_succ(n, [n if m == s else m for m in out])
        self.calls[n] = self.calls[n] or self.calls[s]
        return True

    def reduce_structured(self) -> None:
        changed = True
        while changed:
            changed = False
            for n in sorted(self.succ):
                if n not in self.succ:
                    continue
                for rule in (self.dedupe, self.drop_self_loop, self.merge_forward, self.bypass):
                    if n in self.succ and rule(n):
                        changed = True


def essential(g: ControlFlowGraph) -> int:
    """Cyclomatic complexity left after collapsing every structured construct.

    Sequences, if-then(-else), switch, while and do-while regions are
    collapsed to single nodes, outermost first, until nothing changes.  Fully
    structured code reduces to ``entry -> exit`` and scores 1.
    """
    r = _Reducer(g)
    r.reduce_structured()
    return r.v()


def immediate_dominators(succ: dict[int, list[int]], root: int) -> dict[int, int]:
    """Cooper/Harvey/Kennedy iterative dominator algorithm."""
    order: list[int] = []
    seen = {root}
    stack = [(root, iter(succ[root]))]
    while stack:
        node, it = stack[-1]
        for m in it:
            if m not in seen:
                seen.add(m)
                stack.append((m, iter(succ[m])))
                break
        else:
            order.append(node)
            stack.pop()
    rpo = order[::-1]
    index = {n: i for i, n in enumerate(rpo)}
    preds: dict[int, list[int]] = {n: [] for n in rpo}
    for a in rpo:
        for b in succ[a]:
            if b in preds:
                preds[b].append(a)
    idom = {root: root}

    def intersect(a: int, b: int) -> int:
        while a != b:
            while index[a] > index[b]:
                a = idom[a]
            while index[b] > index[a]:
                b = idom[b]
        return a

    changed = True
    while changed:
        changed = False
        for n in rpo[1:]:
            ps = [p for p in preds[n] if p in idom]
            new = ps[0]
            for p in ps[1:]:
                new = intersect(p, new)
            if idom.get(n) != new:
                idom[n] = new
                changed = True
    return idom


def _postdominators(succ: dict[int, list[int]], exit_: int) -> dict[int, int]:
    rev: dict[int, list[int]] = {n: [] for n in succ}
    for a, bs in succ.items():
        for b in bs:
            rev[b].append(a)
    return immediate_dominators(rev, exit_)


def _branch_region(succ: dict[int, list[int]], d: int, stop: int) -> set[int]:
    region: set[int] = set()
    stack = [m for m in succ[d] if m != stop]
    while stack:
        m = stack.pop()
        if m in region:
            continue
        region.add(m)
        stack.extend(x for x in succ[m] if x != stop)
    return region


def design_reduce(g: ControlFlowGraph) -> dict[int, list[int]]:
    """Remove every decision whose branches contain no call, outermost first.

    A removed decision keeps a single edge to its immediate postdominator;
    nodes that become unreachable are dropped.  Returns the reduced
    successor map.
    """
    succ = {n: list(s) for n, s in g.succ.items()}
    calls = {n: bool(node.calls) for n, node in g.nodes.items()}
    changed = True
    while changed:
        changed = False
        ipdom = _postdominators(succ, g.exit)
        for d in sorted(succ):
            if len(set(succ[d])) < 2:
                # Parallel edges are empty alternatives and carry no calls.
                if len(succ[d]) > 1:
                    succ[d] = succ[d][:1]
                    changed = True
                    break
                continue
            stop = ipdom[d]
            region = _branch_region(succ, d, stop)
            if any(calls[m] for m in region):
                continue
            succ[d] = [stop]
            keep = _reach(succ, g.entry)
            for n in list(succ):
                if n not in keep:
                    del succ[n]
            changed = True
            break
    return succ


def design_complexity(g: ControlFlowGraph) -> int:
    succ = design_reduce(g)
    return sum(len(s) for s in succ.values()) - len(succ) + 2
