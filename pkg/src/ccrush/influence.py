"""Which options influence each statement.

Forward abstract interpretation over the program: every variable carries the
set of options its value may depend on, and a pc set carries the options that
decide whether the current statement executes at all (implicit flows).  A
statement's influence is the pc set at that point; conditionals additionally
carry their condition's taint, and their branches run under the extended pc.
Assignments replace a variable's taint outright (branch-local strong update);
joins at post-dominators union the branch environments, which is what keeps
`x := true` inside `if (a)` visible as {A} after the join.

Calls bind argument taints to parameters and run the callee under the caller's
pc.  Analyses of a callee are memoized per (parameter taints, pc) signature,
and results only ever grow, so re-entering a known signature is a no-op.
Loops iterate their body to a fixed point.  Every statement in the program
gets an entry; statements never reached from the entry function stay empty.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .lang import Assign, Call, Expr, If, OptionRead, Program, Return, Stmt, While, Work

Options = frozenset[str]
EMPTY: Options = frozenset()


@dataclass
class InfluenceMap:
    """Statement id -> option set; defined for every statement id."""

    influence: dict[int, Options]

    def __getitem__(self, sid: int) -> Options:
        return self.influence[sid]

    def interactions(self) -> frozenset[Options]:
        return interactions(self.influence)

    def copy(self) -> dict[int, Options]:
        return dict(self.influence)

    def to_json(self) -> str:
        payload = {
            "influence": {str(sid): sorted(opts) for sid, opts in sorted(self.influence.items())}
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def interactions(influence: dict[int, Options]) -> frozenset[Options]:
    """Distinct non-empty option sets appearing in the map."""
    return frozenset(v for v in influence.values() if v)


def expr_taint(expr: Expr, env: dict[str, Options]) -> Options:
    t = EMPTY
    for name in expr.vars():
        t |= env.get(name, EMPTY)
    return t


def analyze(program: Program) -> InfluenceMap:
    si: dict[int, Options] = {s.sid: EMPTY for s in program.statements()}
    memo: set[tuple[str, tuple[Options, ...], Options]] = set()

    def join(a: dict[str, Options], b: dict[str, Options]) -> dict[str, Options]:
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, EMPTY) | v
        return out

    def run_block(stmts: tuple[Stmt, ...], env: dict[str, Options], pc: Options) -> dict[str, Options]:
        for s in stmts:
            if isinstance(s, OptionRead):
                si[s.sid] |= pc
                env[s.var] = frozenset({s.option}) | pc
            elif isinstance(s, Assign):
                si[s.sid] |= pc
                env[s.var] = expr_taint(s.expr, env) | pc
            elif isinstance(s, (Work, Return)):
                si[s.sid] |= pc
            elif isinstance(s, Call):
                si[s.sid] |= pc
                args = tuple(expr_taint(a, env) for a in s.args)
                run_function(s.callee, args, pc)
            elif isinstance(s, If):
                t = expr_taint(s.cond, env) | pc
                si[s.sid] |= t
                after_then = run_block(s.then, dict(env), t)
                after_else = run_block(s.orelse, dict(env), t)
                env = join(after_then, after_else)
            elif isinstance(s, While):
                while True:
                    t = expr_taint(s.cond, env) | pc
                    si[s.sid] |= t
                    after_body = run_block(s.body, dict(env), t)
                    merged = join(env, after_body)
                    if merged == env:
                        break
                    env = merged
            else:
                raise TypeError(s)
        return env

    def run_function(name: str, arg_taints: tuple[Options, ...], pc: Options) -> None:
        key = (name, arg_taints, pc)
        if key in memo:
            return
        memo.add(key)
        fn = program.functions[name]
        env = dict(zip(fn.params, arg_taints))
        run_block(fn.body, env, pc)

    run_function(program.entry, (), EMPTY)
    return InfluenceMap(si)
