"""Syntax tree for CCL programs.

A program is a set of boolean options plus a list of functions; `main` is the
entry point.  Statements carry a globally unique integer id assigned in source
order by the parser, which everything downstream (influence maps, regions,
serialization) uses as the stable statement key.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional


# --- boolean expressions -----------------------------------------------------


@dataclass(frozen=True)
class Expr:
    def vars(self) -> Iterator[str]:
        raise NotImplementedError


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def vars(self) -> Iterator[str]:
        yield self.name


@dataclass(frozen=True)
class Lit(Expr):
    value: bool

    def vars(self) -> Iterator[str]:
        return iter(())


@dataclass(frozen=True)
class Not(Expr):
    operand: Expr

    def vars(self) -> Iterator[str]:
        return self.operand.vars()


@dataclass(frozen=True)
class And(Expr):
    left: Expr
    right: Expr

    def vars(self) -> Iterator[str]:
        yield from self.left.vars()
        yield from self.right.vars()


@dataclass(frozen=True)
class Or(Expr):
    left: Expr
    right: Expr

    def vars(self) -> Iterator[str]:
        yield from self.left.vars()
        yield from self.right.vars()


# --- statements ---------------------------------------------------------------


@dataclass(frozen=True)
class Stmt:
    sid: int
    line: int


@dataclass(frozen=True)
class OptionRead(Stmt):
    var: str
    option: str


@dataclass(frozen=True)
class Assign(Stmt):
    var: str
    expr: Expr


@dataclass(frozen=True)
class Work(Stmt):
    # cost in milliseconds; exact rational so virtual time never rounds
    cost: Fraction


@dataclass(frozen=True)
class Call(Stmt):
    callee: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class Return(Stmt):
    pass


@dataclass(frozen=True)
class If(Stmt):
    cond: Expr
    then: tuple[Stmt, ...]
    orelse: tuple[Stmt, ...]


@dataclass(frozen=True)
class While(Stmt):
    cond: Expr
    bound: int
    body: tuple[Stmt, ...]


@dataclass(frozen=True)
class Function:
    name: str
    params: tuple[str, ...]
    body: tuple[Stmt, ...]


@dataclass
class Program:
    options: tuple[str, ...]
    functions: dict[str, Function]
    entry: str = "main"
    source_name: str = "<string>"
    _by_sid: dict[int, Stmt] = field(default_factory=dict, repr=False)
    _fn_of: dict[int, str] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for fn in self.functions.values():
            for s in walk(fn.body):
                self._by_sid[s.sid] = s
                self._fn_of[s.sid] = fn.name

    def statement(self, sid: int) -> Stmt:
        return self._by_sid[sid]

    def function_of(self, sid: int) -> str:
        return self._fn_of[sid]

    def statements(self) -> Iterator[Stmt]:
        for fn in self.functions.values():
            yield from walk(fn.body)

    def statement_ids(self) -> list[int]:
        return sorted(self._by_sid)


def walk(stmts: tuple[Stmt, ...]) -> Iterator[Stmt]:
    """All statements in a block, outer before inner, in source order."""
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from walk(s.then)
            yield from walk(s.orelse)
        elif isinstance(s, While):
            yield from walk(s.body)


# --- pretty printer -----------------------------------------------------------


def expr_source(e: Expr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Lit):
        return "true" if e.value else "false"
    if isinstance(e, Not):
        return "!" + _atom(e.operand)
    if isinstance(e, And):
        return f"{_and_side(e.left)} && {_and_side(e.right)}"
    if isinstance(e, Or):
        return f"{_or_side(e.left)} || {_or_side(e.right)}"
    raise TypeError(e)


def _atom(e: Expr) -> str:
    if isinstance(e, (Var, Lit, Not)):
        return expr_source(e)
    return "(" + expr_source(e) + ")"


def _and_side(e: Expr) -> str:
    return "(" + expr_source(e) + ")" if isinstance(e, Or) else expr_source(e)


def _or_side(e: Expr) -> str:
    return expr_source(e)


def _cost_source(cost: Fraction) -> str:
    if cost.denominator == 1:
        return str(cost.numerator)
    return str(float(cost))


def to_source(program: Program) -> str:
    """Canonical source text; parsing it back yields an equal Program."""
    out: list[str] = []
    if program.options:
        out.append("options " + ", ".join(program.options) + ";")
        out.append("")
    for fn in program.functions.values():
        out.append(f"fn {fn.name}({', '.join(fn.params)}) {{")
        _block(fn.body, out, 1)
        out.append("}")
        out.append("")
    return "\n".join(out).rstrip() + "\n"


def _block(stmts: tuple[Stmt, ...], out: list[str], depth: int) -> None:
    pad = "  " * depth
    for s in stmts:
        if isinstance(s, OptionRead):
            out.append(f'{pad}{s.var} := opt("{s.option}");')
        elif isinstance(s, Assign):
            out.append(f"{pad}{s.var} := {expr_source(s.expr)};")
        elif isinstance(s, Work):
            out.append(f"{pad}work({_cost_source(s.cost)});")
        elif isinstance(s, Call):
            args = ", ".join(expr_source(a) for a in s.args)
            out.append(f"{pad}call {s.callee}({args});")
        elif isinstance(s, Return):
            out.append(f"{pad}return;")
        elif isinstance(s, If):
            out.append(f"{pad}if ({expr_source(s.cond)}) {{")
            _block(s.then, out, depth + 1)
            if s.orelse:
                out.append(f"{pad}}} else {{")
                _block(s.orelse, out, depth + 1)
            out.append(pad + "}")
        elif isinstance(s, While):
            out.append(f"{pad}while ({expr_source(s.cond)}) bound {s.bound} {{")
            _block(s.body, out, depth + 1)
            out.append(pad + "}")
        else:
            raise TypeError(s)
