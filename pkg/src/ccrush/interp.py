"""Deterministic interpreter with a virtual clock and region instrumentation.

Work statements advance a rational virtual clock, so measurements are exact
and runs are reproducible bit for bit.  A wall clock mode that actually sleeps
is available for demonstration.  Region enter/exit bookkeeping follows CFG
edge crossings: crossing an end edge pops matching frames, crossing a start
edge pushes one.  Exclusive time per region is the frame's span minus the
spans of its children, so the base region plus all region times add up to the
end-to-end time exactly.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from time import perf_counter_ns, sleep
from typing import Callable, Iterable, Mapping

from .lang import (
    ENTRY,
    EXIT,
    And,
    Assign,
    Call,
    Function,
    If,
    Lit,
    Not,
    Or,
    OptionRead,
    Program,
    Return,
    Stmt,
    Var,
    While,
    Work,
)
from .regions import Region, RegionSet

Config = frozenset[str]


class LoopBoundExceeded(RuntimeError):
    """A loop ran past its declared iteration bound."""

    def __init__(self, sid: int, bound: int):
        super().__init__(f"loop at statement {sid} exceeded its bound of {bound}")
        self.sid = sid
        self.bound = bound


class RegionBalanceError(RuntimeError):
    """Region enter/exit events did not nest properly."""


class VirtualClock:
    def __init__(self) -> None:
        self._now = Fraction(0)

    def now(self) -> Fraction:
        return self._now

    def work(self, cost_ms: Fraction) -> None:
        self._now += cost_ms


class WallClock:
    def __init__(self) -> None:
        self._t0 = perf_counter_ns()

    def now(self) -> Fraction:
        return Fraction(perf_counter_ns() - self._t0, 1_000_000)

    def work(self, cost_ms: Fraction) -> None:
        sleep(float(cost_ms) / 1000.0)


class Thunk:
    """A deferred option read; forced at most once."""

    __slots__ = ("option", "_reader", "_value", "forced")

    def __init__(self, option: str, reader: Callable[[str], bool]):
        self.option = option
        self._reader = reader
        self._value = False
        self.forced = False

    def force(self) -> bool:
        if not self.forced:
            self._value = self._reader(self.option)
            self.forced = True
        return self._value


@dataclass
class RunResult:
    config: Config
    end_to_end: Fraction
    region_times: dict[str, Fraction]
    region_events: dict[str, int]
    events: int
    stmt_counts: dict[int, int] | None = None
    stmt_work: dict[int, Fraction] | None = None


@dataclass
class _Frame:
    region: Region
    entered_at: Fraction
    child_time: Fraction = Fraction(0)


class _Run:
    def __init__(
        self,
        program: Program,
        reader: Callable[[str], bool],
        regions: RegionSet | None,
        clock,
        lazy: bool,
        count_statements: bool,
    ):
        self.program = program
        self.reader = reader
        self.regions = regions
        self.clock = clock
        self.lazy = lazy
        self.counts: dict[int, int] | None = {} if count_statements else None
        self.work: dict[int, Fraction] | None = {} if count_statements else None

        self._starts: dict[str, dict[tuple, Region]] = {}
        self._ends: dict[str, dict[tuple, list[Region]]] = {}
        self.times: dict[str, Fraction] = {}
        self.event_counts: dict[str, int] = {}
        self.total_events = 0
        self._stack: list[_Frame] = []
        if regions is not None:
            for fn in program.functions:
                self._starts[fn] = {}
                self._ends[fn] = {}
            for r in regions.regions:
                self.times[r.rid] = Fraction(0)
                self.event_counts[r.rid] = 0
                for e in r.start_edges:
                    self._starts[r.function][e] = r
                for e in r.end_edges:
                    self._ends[r.function].setdefault(e, []).append(r)
            base = regions.base
            self.times[base.rid] = Fraction(0)
            self.event_counts[base.rid] = 0
            self._stack.append(_Frame(base, clock.now()))
            self._note_event(base.rid)

    # -- region bookkeeping ------------------------------------------------

    def _note_event(self, rid: str) -> None:
        self.event_counts[rid] += 1
        self.total_events += 1

    def _push(self, region: Region) -> None:
        self._stack.append(_Frame(region, self.clock.now()))
        self._note_event(region.rid)

    def _pop(self) -> None:
        frame = self._stack.pop()
        duration = self.clock.now() - frame.entered_at
        self.times[frame.region.rid] += duration - frame.child_time
        if self._stack:
            self._stack[-1].child_time += duration
        self._note_event(frame.region.rid)

    def _cross(self, fn: str, src, dst) -> None:
        if self.regions is None:
            return
        key = (src, dst)
        enders = self._ends[fn].get(key)
        if enders:
            ids = {r.rid for r in enders}
            while len(self._stack) > 1 and self._stack[-1].region.rid in ids:
                self._pop()
            for frame in self._stack[1:]:
                if frame.region.rid in ids:
                    raise RegionBalanceError(
                        f"region {frame.region.rid} would close across an open child"
                    )
        starter = self._starts[fn].get(key)
        if starter is not None:
            self._push(starter)

    def finish(self) -> None:
        if self.regions is None:
            return
        if len(self._stack) != 1:
            open_ids = ", ".join(f.region.rid for f in self._stack[1:])
            raise RegionBalanceError(f"regions left open at program exit: {open_ids}")
        self._pop()

    # -- expressions ---------------------------------------------------------

    def _force(self, v):
        return v.force() if isinstance(v, Thunk) else v

    def _eval(self, e, env):
        if isinstance(e, Var):
            return env[e.name]
        if isinstance(e, Lit):
            return e.value
        if isinstance(e, Not):
            return not self._truth(e.operand, env)
        if isinstance(e, And):
            return self._truth(e.left, env) and self._truth(e.right, env)
        if isinstance(e, Or):
            return self._truth(e.left, env) or self._truth(e.right, env)
        raise TypeError(f"unknown expression node: {e!r}")

    def _truth(self, e, env) -> bool:
        return bool(self._force(self._eval(e, env)))

    # -- statements ----------------------------------------------------------

    def _note(self, stmt: Stmt, cost: Fraction | None = None) -> None:
        if self.counts is not None:
            self.counts[stmt.sid] = self.counts.get(stmt.sid, 0) + 1
            if cost is not None:
                assert self.work is not None
                self.work[stmt.sid] = self.work.get(stmt.sid, Fraction(0)) + cost

    def _function(self, name: str, args: list) -> None:
        fn = self.program.functions[name]
        env = dict(zip(fn.params, args))
        last = self._block(fn, fn.body, env, ENTRY)
        self._cross(fn.name, last, EXIT)

    def _block(self, fn: Function, stmts, env: dict, prev) -> object:
        for s in stmts:
            self._cross(fn.name, prev, s.sid)
            prev = self._stmt(fn, s, env)
        return prev

    def _stmt(self, fn: Function, s: Stmt, env: dict) -> object:
        if isinstance(s, OptionRead):
            self._note(s)
            if self.lazy:
                env[s.var] = Thunk(s.option, self.reader)
            else:
                env[s.var] = self.reader(s.option)
            return s.sid
        if isinstance(s, Assign):
            self._note(s)
            env[s.var] = self._eval(s.expr, env)
            return s.sid
        if isinstance(s, Work):
            self._note(s, s.cost)
            self.clock.work(s.cost)
            return s.sid
        if isinstance(s, Return):
            self._note(s)
            return s.sid
        if isinstance(s, Call):
            self._note(s)
            args = [self._eval(a, env) for a in s.args]
            self._function(s.callee, args)
            return s.sid
        if isinstance(s, If):
            self._note(s)
            branch = s.then if self._truth(s.cond, env) else s.orelse
            if branch:
                return self._block(fn, branch, env, s.sid)
            return s.sid
        if isinstance(s, While):
            iterations = 0
            while True:
                self._note(s)
                if not self._truth(s.cond, env):
                    return s.sid
                iterations += 1
                if iterations > s.bound:
                    raise LoopBoundExceeded(s.sid, s.bound)
                last = self._block(fn, s.body, env, s.sid)
                self._cross(fn.name, last, s.sid)
        raise TypeError(f"unknown statement node: {s!r}")


def run(
    program: Program,
    config: Iterable[str] | Mapping[str, bool] = frozenset(),
    *,
    region_set: RegionSet | None = None,
    clock: str = "virtual",
    reader: Callable[[str], bool] | None = None,
    lazy: bool = False,
    count_statements: bool = False,
) -> RunResult:
    """Execute the program under one configuration.

    `reader` overrides plain config lookup (used by exploration strategies
    that record or decide option values on the fly); `lazy` defers each
    option read until its value is first needed by a condition.
    """
    if isinstance(config, Mapping):
        enabled = frozenset(o for o, v in config.items() if v)
    else:
        enabled = frozenset(config)
    unknown = enabled - set(program.options)
    if unknown:
        raise ValueError(f"undeclared options in configuration: {', '.join(sorted(unknown))}")
    if reader is None:
        reader = lambda o: o in enabled
    clk = VirtualClock() if clock == "virtual" else WallClock()

    state = _Run(program, reader, region_set, clk, lazy, count_statements)
    t0 = clk.now()
    state._function(program.entry, [])
    state.finish()
    total = clk.now() - t0

    if region_set is not None and clock == "virtual":
        booked = sum(state.times.values(), Fraction(0))
        if booked != total:
            raise RegionBalanceError(
                f"region times {booked} do not add up to end-to-end time {total}"
            )
    return RunResult(
        config=enabled,
        end_to_end=total,
        region_times=dict(state.times),
        region_events=dict(state.event_counts),
        events=state.total_events,
        stmt_counts=state.counts,
        stmt_work=state.work,
    )


@dataclass
class PerformanceMap:
    """Measured per-region times for a set of configurations."""

    options: tuple[str, ...]
    region_ids: tuple[str, ...]
    configurations: tuple[Config, ...]
    region_times: dict[Config, dict[str, Fraction]]
    end_to_end: dict[Config, Fraction]
    events: dict[Config, int]

    def to_json(self) -> str:
        import json

        payload = {
            "options": list(self.options),
            "regions": list(self.region_ids),
            "measurements": [
                {
                    "configuration": sorted(c),
                    "end_to_end_ms": str(self.end_to_end[c]),
                    "events": self.events[c],
                    "region_ms": {r: str(t) for r, t in self.region_times[c].items()},
                }
                for c in self.configurations
            ],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def measure(
    program: Program,
    configurations: Iterable[Config],
    region_set: RegionSet,
    *,
    jobs: int = 1,
    repetitions: int = 1,
    clock: str = "virtual",
) -> PerformanceMap:
    """Run every configuration and collect exclusive region times.

    Repetitions are averaged; with the virtual clock they are identical, so
    the default is a single run.
    """
    configs = tuple(configurations)

    def one(c: Config) -> tuple[dict[str, Fraction], Fraction, int]:
        times: dict[str, Fraction] = {}
        total = Fraction(0)
        events = 0
        for _ in range(repetitions):
            res = run(program, c, region_set=region_set, clock=clock)
            for rid, t in res.region_times.items():
                times[rid] = times.get(rid, Fraction(0)) + t
            total += res.end_to_end
            events = res.events
        n = repetitions
        return {r: t / n for r, t in times.items()}, total / n, events

    if jobs > 1 and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, configs))
    else:
        results = [one(c) for c in configs]

    region_ids = tuple([region_set.base.rid] + [r.rid for r in region_set.regions])
    return PerformanceMap(
        options=program.options,
        region_ids=region_ids,
        configurations=configs,
        region_times={c: r[0] for c, r in zip(configs, results)},
        end_to_end={c: r[1] for c, r in zip(configs, results)},
        events={c: r[2] for c, r in zip(configs, results)},
    )
