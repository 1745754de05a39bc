"""Per-function control-flow graphs with dominator / post-dominator trees.

Nodes are statement ids plus the synthetic "entry" / "exit" markers of the
function.  Edges carry a label: fallthrough, true, false, or loop-back (the
retreating edges of `while`).  Dominance is computed by the standard iterative
set-intersection fixed point; post-dominance is dominance on the reversed
graph, so the two trees are exact duals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast import Function, If, Stmt, While

ENTRY = "entry"
EXIT = "exit"

Node = int | str

FALLTHROUGH = "fallthrough"
TRUE = "true"
FALSE = "false"
LOOP_BACK = "loop-back"


@dataclass(frozen=True)
class Edge:
    src: Node
    dst: Node
    label: str

    def key(self) -> tuple[Node, Node]:
        return (self.src, self.dst)


@dataclass
class Cfg:
    function: str
    nodes: list[Node]
    edges: list[Edge]
    succs: dict[Node, list[Edge]] = field(default_factory=dict)
    preds: dict[Node, list[Edge]] = field(default_factory=dict)
    idom: dict[Node, Node | None] = field(default_factory=dict)
    ipdom: dict[Node, Node | None] = field(default_factory=dict)

    def in_edges(self, node: Node) -> list[Edge]:
        return self.preds[node]

    def out_edges(self, node: Node) -> list[Edge]:
        return self.succs[node]

    def between(self, start: Node, end: Node) -> set[Node]:
        """Nodes on paths from `start` to `end`, excluding `end` itself.

        `end` must post-dominate `start`; every forward walk therefore stays
        inside the span until it hits `end`.
        """
        seen: set[Node] = set()
        frontier = [start]
        while frontier:
            n = frontier.pop()
            if n in seen or n == end:
                continue
            seen.add(n)
            for e in self.succs[n]:
                frontier.append(e.dst)
        return seen


def build_cfg(fn: Function) -> Cfg:
    edges: list[Edge] = []
    nodes: list[Node] = [ENTRY]

    def emit(src: Node, dst: Node, label: str) -> None:
        edges.append(Edge(src, dst, label))

    def block(stmts: tuple[Stmt, ...], incoming: list[tuple[Node, str]]) -> list[tuple[Node, str]]:
        for s in stmts:
            nodes.append(s.sid)
            for src, label in incoming:
                emit(src, s.sid, label)
            if isinstance(s, If):
                t_out = block(s.then, [(s.sid, TRUE)])
                e_out = block(s.orelse, [(s.sid, FALSE)]) if s.orelse else [(s.sid, FALSE)]
                incoming = t_out + e_out
            elif isinstance(s, While):
                body_out = block(s.body, [(s.sid, TRUE)])
                for src, _ in body_out:
                    emit(src, s.sid, LOOP_BACK)
                incoming = [(s.sid, FALSE)]
            else:
                incoming = [(s.sid, FALLTHROUGH)]
        return incoming

    for src, label in block(fn.body, [(ENTRY, FALLTHROUGH)]):
        emit(src, EXIT, label)
    nodes.append(EXIT)

    cfg = Cfg(function=fn.name, nodes=nodes, edges=edges)
    cfg.succs = {n: [] for n in nodes}
    cfg.preds = {n: [] for n in nodes}
    for e in edges:
        cfg.succs[e.src].append(e)
        cfg.preds[e.dst].append(e)
    cfg.idom = _immediate_dominators(nodes, cfg.succs, cfg.preds, ENTRY, forward=True)
    cfg.ipdom = _immediate_dominators(nodes, cfg.succs, cfg.preds, EXIT, forward=False)
    return cfg


def _immediate_dominators(
    nodes: list[Node],
    succs: dict[Node, list[Edge]],
    preds: dict[Node, list[Edge]],
    root: Node,
    forward: bool,
) -> dict[Node, Node | None]:
    def nexts(n: Node) -> list[Node]:
        es = succs[n] if forward else preds[n]
        return [e.dst if forward else e.src for e in es]

    def prevs(n: Node) -> list[Node]:
        es = preds[n] if forward else succs[n]
        return [e.src if forward else e.dst for e in es]

    order: list[Node] = []
    seen: set[Node] = set()

    def dfs(n: Node) -> None:
        seen.add(n)
        for m in nexts(n):
            if m not in seen:
                dfs(m)
        order.append(n)

    dfs(root)
    rpo = list(reversed(order))

    universe = set(rpo)
    dom: dict[Node, set[Node]] = {n: universe for n in rpo}
    dom[root] = {root}
    changed = True
    while changed:
        changed = False
        for n in rpo:
            if n == root:
                continue
            ps = [dom[p] for p in prevs(n) if p in universe]
            new = set.intersection(*ps) | {n} if ps else {n}
            if new != dom[n]:
                dom[n] = new
                changed = True

    idom: dict[Node, Node | None] = {root: None}
    for n in rpo:
        if n == root:
            continue
        strict = dom[n] - {n}
        idom[n] = max(strict, key=lambda d: len(dom[d]))
    for n in nodes:
        idom.setdefault(n, None)
    return idom
