"""Call graph over CCL functions: edges, cycle check, callee-first order."""

from __future__ import annotations

from .ast import Call, Program, walk


def call_edges(program: Program) -> list[tuple[str, int, str]]:
    """(caller, call-site statement id, callee) triples in source order."""
    out = []
    for fn in program.functions.values():
        for s in walk(fn.body):
            if isinstance(s, Call):
                out.append((fn.name, s.sid, s.callee))
    return out


def call_sites(program: Program) -> dict[str, list[int]]:
    """Map callee name -> call-site statement ids (all callees present)."""
    sites: dict[str, list[int]] = {name: [] for name in program.functions}
    for _, sid, callee in call_edges(program):
        if callee in sites:
            sites[callee].append(sid)
    return sites


def call_graph_cycle(program: Program) -> list[str] | None:
    """A cycle as a function-name path, or None if the graph is acyclic."""
    adj: dict[str, set[str]] = {name: set() for name in program.functions}
    for caller, _, callee in call_edges(program):
        if callee in adj:
            adj[caller].add(callee)

    WHITE, GREY, BLACK = 0, 1, 2
    color = {name: WHITE for name in program.functions}
    stack: list[str] = []

    def visit(n: str) -> list[str] | None:
        color[n] = GREY
        stack.append(n)
        for m in sorted(adj[n]):
            if color[m] == GREY:
                return stack[stack.index(m):] + [m]
            if color[m] == WHITE:
                found = visit(m)
                if found:
                    return found
        stack.pop()
        color[n] = BLACK
        return None

    for name in program.functions:
        if color[name] == WHITE:
            found = visit(name)
            if found:
                return found
    return None


def callee_first(program: Program) -> list[str]:
    """Function names ordered so every callee precedes its callers."""
    adj: dict[str, set[str]] = {name: set() for name in program.functions}
    for caller, _, callee in call_edges(program):
        if callee in adj:
            adj[caller].add(callee)
    order: list[str] = []
    done: set[str] = set()

    def visit(n: str) -> None:
        if n in done:
            return
        done.add(n)
        for m in sorted(adj[n]):
            visit(m)
        order.append(n)

    for name in program.functions:  # source order for determinism
        visit(name)
    return order
