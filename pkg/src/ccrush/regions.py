"""Instrumentation regions: where to start and stop per-influence timers.

A region groups consecutive statements that share one influencing option set,
so one timer per region replaces per-statement measurement.  Identification
walks each function's CFG: a region starts before any statement whose
influence is non-empty and differs from its immediate dominator's, and ends at
the first node along the post-dominator chain whose influence differs from the
region's.  Start edges omit loop-back edges so a loop-wrapping region is
entered once, not per iteration.

The optimizer then shrinks the number of region events an execution produces
without changing what the models can express.  Two moves are allowed:

* absorb un-influenced statements into a span (they cost nothing to cover);
* merge two regions (nested, caller/callee, or consecutive) when the union of
  their option sets is covered by an already-observed interaction, because the
  compressed configuration set already samples every combination of a covered
  union.

Merging is expressed by raising statement influences and re-identifying.  The
order is fixed for determinism: pull-outs first (loop headers innermost-first,
then nested region starts deepest-first, then whole-body callees into their
call sites), each followed by downward subset-raising below control
statements; only once pull-outs reach a fixed point are consecutive regions
merged.  Running consecutive merges earlier could commit a region to a union
that blocks a more profitable pull-out, so the phases are strictly staged.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .influence import EMPTY, InfluenceMap, Options, interactions
from .lang import (
    EXIT,
    LOOP_BACK,
    Cfg,
    If,
    Program,
    While,
    build_cfg,
    call_sites,
    callee_first,
    walk,
)

EdgeKey = tuple[object, object]


@dataclass(frozen=True)
class Region:
    rid: str
    function: str
    options: Options
    start_edges: frozenset[EdgeKey]
    end_edges: frozenset[EdgeKey]
    start: int | None  # statement the region starts before (None for base)
    end: object | None  # node whose in-edges close the region


@dataclass
class RegionSet:
    regions: list[Region]
    base: Region
    influence: dict[str, Options]  # region id -> option set (base included)

    def all_regions(self) -> list[Region]:
        return [self.base] + self.regions

    def by_id(self, rid: str) -> Region:
        for r in self.all_regions():
            if r.rid == rid:
                return r
        raise KeyError(rid)

    def to_json(self) -> str:
        def edges(es: frozenset[EdgeKey]) -> list[list[object]]:
            return [list(e) for e in sorted(es, key=lambda t: (str(t[0]), str(t[1])))]

        payload = {
            "base": self.base.rid,
            "regions": [
                {
                    "id": r.rid,
                    "function": r.function,
                    "options": sorted(r.options),
                    "start": edges(r.start_edges),
                    "end": edges(r.end_edges),
                }
                for r in self.regions
            ],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def merge_ok(i1: Options, i2: Options, gi: frozenset[Options]) -> bool:
    """May regions influenced by i1 and i2 become one region?

    True when the union is covered by an interaction we already sample: the
    merged region then needs no configurations beyond the compressed set.
    """
    if not i1 or not i2:
        raise ValueError("merge_ok is defined for non-empty interactions")
    u = i1 | i2
    return any(u <= g for g in gi)


def _covered(u: Options, gi: frozenset[Options]) -> bool:
    return any(u <= g for g in gi)


def build_cfgs(program: Program) -> dict[str, Cfg]:
    return {name: build_cfg(fn) for name, fn in program.functions.items()}


def _as_map(si: InfluenceMap | dict[int, Options]) -> dict[int, Options]:
    return si.copy() if isinstance(si, InfluenceMap) else dict(si)


def _contexts(program: Program, si: dict[int, Options]) -> dict[str, Options]:
    """Influence of each function's synthetic entry/exit: what every call site
    already carries.  The entry function (and never-called functions) get ∅."""
    sites = call_sites(program)
    ctx: dict[str, Options] = {}
    for name in program.functions:
        ids = sites.get(name, [])
        if name == program.entry or not ids:
            ctx[name] = EMPTY
        else:
            acc: Options | None = None
            for sid in ids:
                acc = si[sid] if acc is None else acc & si[sid]
            ctx[name] = acc if acc is not None else EMPTY
    return ctx


def _inf(node: object, si: dict[int, Options], ctx: Options) -> Options:
    return si[node] if isinstance(node, int) else ctx


def _region_starts(fn_name: str, program: Program, cfg: Cfg, si: dict[int, Options], ctx: Options) -> list[int]:
    starts = []
    for s in walk(program.functions[fn_name].body):
        if not si[s.sid]:
            continue
        idom = cfg.idom[s.sid]
        if idom is None:
            continue
        if si[s.sid] != _inf(idom, si, ctx):
            starts.append(s.sid)
    return starts


def _end_node(sid: int, cfg: Cfg, si: dict[int, Options], ctx: Options) -> object:
    target = si[sid]
    p = cfg.ipdom[sid]
    while p != EXIT and _inf(p, si, ctx) == target:
        p = cfg.ipdom[p]
    return p


def _region_id(fn_name: str, start_edges: frozenset[EdgeKey]) -> str:
    text = fn_name + "|" + ";".join(f"{s}->{d}" for s, d in sorted(start_edges, key=lambda t: (str(t[0]), str(t[1]))))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def identify_regions(
    program: Program,
    si: InfluenceMap | dict[int, Options],
    cfgs: dict[str, Cfg] | None = None,
) -> RegionSet:
    simap = _as_map(si)
    cfgs = cfgs or build_cfgs(program)
    ctxs = _contexts(program, simap)
    regions: list[Region] = []
    for name in program.functions:
        cfg = cfgs[name]
        ctx = ctxs[name]
        for sid in _region_starts(name, program, cfg, simap, ctx):
            start_edges = frozenset(e.key() for e in cfg.in_edges(sid) if e.label != LOOP_BACK)
            end = _end_node(sid, cfg, simap, ctx)
            end_edges = frozenset(e.key() for e in cfg.in_edges(end))
            regions.append(
                Region(
                    rid=_region_id(name, start_edges),
                    function=name,
                    options=simap[sid],
                    start_edges=start_edges,
                    end_edges=end_edges,
                    start=sid,
                    end=end,
                )
            )
    base = Region(
        rid=hashlib.sha256(f"base|{program.entry}".encode()).hexdigest()[:12],
        function=program.entry,
        options=EMPTY,
        start_edges=frozenset(),
        end_edges=frozenset(),
        start=None,
        end=None,
    )
    influence = {r.rid: r.options for r in regions}
    influence[base.rid] = EMPTY
    return RegionSet(regions=regions, base=base, influence=influence)


# --- optimization -------------------------------------------------------------


def _dom_depth(cfg: Cfg) -> dict[object, int]:
    depth: dict[object, int] = {}

    def d(n: object) -> int:
        if n not in depth:
            i = cfg.idom[n]
            depth[n] = 0 if i is None else d(i) + 1
        return depth[n]

    for n in cfg.nodes:
        d(n)
    return depth


def _while_headers(program: Program, fn_name: str) -> list[int]:
    """While statement ids, innermost loops first."""
    found: list[tuple[int, int]] = []

    def scan(stmts, depth: int) -> None:
        for s in stmts:
            if isinstance(s, While):
                found.append((depth, s.sid))
                scan(s.body, depth + 1)
            elif isinstance(s, If):
                scan(s.then, depth)
                scan(s.orelse, depth)

    scan(program.functions[fn_name].body, 0)
    return [sid for _, sid in sorted(found, key=lambda t: (-t[0], t[1]))]


def propagate_up(
    program: Program,
    si: InfluenceMap | dict[int, Options],
    gi: frozenset[Options],
    cfgs: dict[str, Cfg] | None = None,
) -> dict[int, Options]:
    """One pull-out sweep: raise loop headers, enclosing region starts, and
    call sites toward the regions nested under them, wherever the union is
    still covered by an observed interaction."""
    simap = _as_map(si)
    cfgs = cfgs or build_cfgs(program)
    _pull_up_pass(program, simap, gi, cfgs)
    return simap


def _pull_up_pass(program: Program, si: dict[int, Options], gi: frozenset[Options], cfgs: dict[str, Cfg]) -> bool:
    changed = False
    order = callee_first(program)
    ctxs = _contexts(program, si)

    for name in order:
        cfg = cfgs[name]
        # loop headers absorb regions that would otherwise pulse per iteration
        for h in _while_headers(program, name):
            header = program.statement(h)
            body_ids = {s.sid for s in walk(header.body)}
            for c in _region_starts(name, program, cfg, si, ctxs[name]):
                if c not in body_ids:
                    continue
                u = si[h] | si[c]
                if u != si[h] and _covered(u, gi):
                    si[h] = u
                    changed = True
        # inner regions merge into the region start that encloses them
        ctx = _contexts(program, si)[name]
        starts = _region_starts(name, program, cfg, si, ctx)
        spans = {c: cfg.between(c, _end_node(c, cfg, si, ctx)) for c in starts}
        depth = _dom_depth(cfg)
        for c in sorted(starts, key=lambda s: (-depth[s], s)):
            enclosing = [e for e in starts if e != c and c in spans[e]]
            if not enclosing:
                continue
            e = max(enclosing, key=lambda s: depth[s])
            u = si[e] | si[c]
            if u != si[e] and _covered(u, gi):
                si[e] = u
                changed = True

    # a callee whose whole body shares one influence moves to its call sites
    sites = call_sites(program)
    for name in order:
        if name == program.entry:
            continue
        body = [si[s.sid] for s in walk(program.functions[name].body)]
        uniform = set(body)
        if len(uniform) != 1:
            continue
        body_inf = uniform.pop()
        if not body_inf:
            continue
        for cs in sites[name]:
            u = si[cs] | body_inf
            if u != si[cs] and _covered(u, gi):
                si[cs] = u
                changed = True
    return changed


def propagate_down(
    program: Program,
    si: InfluenceMap | dict[int, Options],
    cfgs: dict[str, Cfg] | None = None,
) -> dict[int, Options]:
    """Raise every statement between a control statement and its immediate
    post-dominator whose influence is a strict subset of the control's."""
    simap = _as_map(si)
    cfgs = cfgs or build_cfgs(program)
    while _down_pass(program, simap, cfgs):
        pass
    return simap


def _down_pass(program: Program, si: dict[int, Options], cfgs: dict[str, Cfg]) -> bool:
    changed = False
    for name in program.functions:
        cfg = cfgs[name]
        for s in walk(program.functions[name].body):
            if not isinstance(s, (If, While)) or not si[s.sid]:
                continue
            end = cfg.ipdom[s.sid]
            for node in cfg.between(s.sid, end):
                if isinstance(node, int) and node != s.sid and si[node] < si[s.sid]:
                    si[node] = si[s.sid]
                    changed = True
    return changed


def _consecutive_pass(program: Program, si: dict[int, Options], gi: frozenset[Options], cfgs: dict[str, Cfg]) -> bool:
    changed = False
    for name in program.functions:
        cfg = cfgs[name]
        merged = True
        while merged:
            merged = False
            ctx = _contexts(program, si)[name]
            starts = _region_starts(name, program, cfg, si, ctx)
            start_set = set(starts)
            for c in starts:
                end = _end_node(c, cfg, si, ctx)
                if not isinstance(end, int) or end not in start_set:
                    continue
                u = si[c] | si[end]
                if (u != si[c] or u != si[end]) and _covered(u, gi):
                    si[c] = u
                    si[end] = u
                    changed = True
                    merged = True
                    break
    return changed


def optimize(
    program: Program,
    si: InfluenceMap | dict[int, Options],
    cfgs: dict[str, Cfg] | None = None,
) -> tuple[RegionSet, dict[int, Options]]:
    """Shrink instrumentation: returns the optimized regions and the raised
    influence map.  The set of admissible unions is frozen from the original
    map, so optimization never manufactures interactions to sample."""
    simap = _as_map(si)
    gi = interactions(simap)
    cfgs = cfgs or build_cfgs(program)

    def pull_to_fixpoint() -> None:
        while True:
            a = _pull_up_pass(program, simap, gi, cfgs)
            b = _down_pass(program, simap, cfgs)
            if not (a or b):
                return

    pull_to_fixpoint()
    while _consecutive_pass(program, simap, gi, cfgs):
        pull_to_fixpoint()
    return identify_regions(program, simap, cfgs), simap
