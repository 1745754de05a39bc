"""Recursive-descent parser and static validator for CCL.

Grammar (semicolon-terminated, `//` line comments):

    program   := [ "options" OPT ("," OPT)* ";" ] fn*
    fn        := "fn" ident "(" [ ident ("," ident)* ] ")" block
    block     := "{" stmt* "}"
    stmt      := ident ":=" "opt" "(" STRING ")" ";"
               | ident ":=" expr ";"
               | "if" "(" expr ")" block [ "else" block ]
               | "while" "(" expr ")" "bound" INT block
               | "work" "(" NUMBER ")" ";"
               | "call" ident "(" [ expr ("," expr)* ] ")" ";"
               | "return" ";"
    expr      := and ( "||" and )*
    and       := unary ( "&&" unary )*
    unary     := "!" unary | "true" | "false" | ident | "(" expr ")"

Option names are uppercase identifiers, variables start lowercase.  The
validator rejects programs where any expression can read an unassigned
variable, where `return` is not the final statement of a function body, or
where the call graph has a cycle.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .ast import (
    And,
    Assign,
    Call,
    Expr,
    Function,
    If,
    Lit,
    Not,
    OptionRead,
    Or,
    Program,
    Return,
    Stmt,
    Var,
    While,
    Work,
)

KEYWORDS = {"options", "fn", "if", "else", "while", "bound", "work", "call", "opt", "return", "true", "false"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<number>\d+(\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[A-Za-z0-9_]*")
  | (?P<op>:=|&&|\|\||[!(){},;])
    """,
    re.VERBOSE,
)

_OPTION_NAME = re.compile(r"[A-Z][A-Z0-9_]*\Z")
_VAR_NAME = re.compile(r"[a-z_][A-Za-z0-9_]*\Z")


class ParseError(Exception):
    """Syntax or static-validation failure, with source position."""

    def __init__(self, message: str, line: int, col: int = 0):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.col = col


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self) -> str:
        return f"{self.kind}({self.text!r})@{self.line}"


def _tokenize(src: str) -> list[_Token]:
    toks: list[_Token] = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup or ""
        text = m.group(0)
        if kind not in ("ws", "comment"):
            if kind == "ident" and text in KEYWORDS:
                kind = text
            toks.append(_Token(kind, text, line, m.start() - line_start + 1))
        line += text.count("\n")
        if "\n" in text:
            line_start = m.start() + text.rindex("\n") + 1
        pos = m.end()
    toks.append(_Token("eof", "", line, 1))
    return toks


class _Parser:
    def __init__(self, src: str, source_name: str):
        self.toks = _tokenize(src)
        self.pos = 0
        self.next_sid = 1
        self.source_name = source_name

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def take(self, kind: str) -> _Token:
        tok = self.toks[self.pos]
        if tok.kind != kind:
            want = kind if kind != "op" else "operator"
            raise ParseError(f"expected {want}, found {tok.text or 'end of input'!r}", tok.line, tok.col)
        self.pos += 1
        return tok

    def take_op(self, text: str) -> _Token:
        tok = self.toks[self.pos]
        if tok.kind != "op" or tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.line, tok.col)
        self.pos += 1
        return tok

    def at_op(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text == text

    def fresh_sid(self) -> int:
        sid = self.next_sid
        self.next_sid += 1
        return sid

    # --- grammar --------------------------------------------------------

    def program(self) -> Program:
        options: tuple[str, ...] = ()
        if self.peek().kind == "options":
            self.take("options")
            names = [self._option_name()]
            while self.at_op(","):
                self.take_op(",")
                names.append(self._option_name())
            self.take_op(";")
            options = tuple(names)
        functions: dict[str, Function] = {}
        while self.peek().kind != "eof":
            fn = self.fn_def()
            if fn.name in functions:
                raise ParseError(f"function {fn.name!r} defined twice", self.peek().line)
            functions[fn.name] = fn
        prog = Program(options=options, functions=functions, source_name=self.source_name)
        _validate(prog)
        return prog

    def _option_name(self) -> str:
        tok = self.take("ident")
        if not _OPTION_NAME.match(tok.text):
            raise ParseError(f"option name must be uppercase: {tok.text!r}", tok.line, tok.col)
        return tok.text

    def fn_def(self) -> Function:
        self.take("fn")
        name = self.take("ident")
        self.take_op("(")
        params: list[str] = []
        if not self.at_op(")"):
            params.append(self._var_name())
            while self.at_op(","):
                self.take_op(",")
                params.append(self._var_name())
        self.take_op(")")
        body = self.block()
        if not body:
            raise ParseError(f"function {name.text!r} has an empty body", name.line)
        if len(set(params)) != len(params):
            raise ParseError(f"duplicate parameter in {name.text!r}", name.line)
        return Function(name=name.text, params=tuple(params), body=body)

    def _var_name(self) -> str:
        tok = self.take("ident")
        if not _VAR_NAME.match(tok.text):
            raise ParseError(f"variable name must start lowercase: {tok.text!r}", tok.line, tok.col)
        return tok.text

    def block(self) -> tuple[Stmt, ...]:
        self.take_op("{")
        stmts: list[Stmt] = []
        while not self.at_op("}"):
            stmts.append(self.stmt())
        self.take_op("}")
        return tuple(stmts)

    def stmt(self) -> Stmt:
        tok = self.peek()
        if tok.kind == "if":
            return self.if_stmt()
        if tok.kind == "while":
            return self.while_stmt()
        if tok.kind == "work":
            return self.work_stmt()
        if tok.kind == "call":
            return self.call_stmt()
        if tok.kind == "return":
            self.take("return")
            sid = self.fresh_sid()
            self.take_op(";")
            return Return(sid=sid, line=tok.line)
        if tok.kind == "ident":
            return self.assign_stmt()
        raise ParseError(f"expected statement, found {tok.text or 'end of input'!r}", tok.line, tok.col)

    def assign_stmt(self) -> Stmt:
        var = self._var_name()
        line = self.toks[self.pos - 1].line
        self.take_op(":=")
        if self.peek().kind == "opt":
            self.take("opt")
            self.take_op("(")
            s = self.take("string")
            self.take_op(")")
            sid = self.fresh_sid()
            self.take_op(";")
            option = s.text[1:-1]
            if not _OPTION_NAME.match(option):
                raise ParseError(f"option name must be uppercase: {option!r}", s.line, s.col)
            return OptionRead(sid=sid, line=line, var=var, option=option)
        expr = self.expr()
        sid = self.fresh_sid()
        self.take_op(";")
        return Assign(sid=sid, line=line, var=var, expr=expr)

    def if_stmt(self) -> Stmt:
        tok = self.take("if")
        self.take_op("(")
        cond = self.expr()
        self.take_op(")")
        sid = self.fresh_sid()
        then = self.block()
        orelse: tuple[Stmt, ...] = ()
        if self.peek().kind == "else":
            self.take("else")
            orelse = self.block()
        return If(sid=sid, line=tok.line, cond=cond, then=then, orelse=orelse)

    def while_stmt(self) -> Stmt:
        tok = self.take("while")
        self.take_op("(")
        cond = self.expr()
        self.take_op(")")
        self.take("bound")
        n = self.take("number")
        if "." in n.text or int(n.text) < 1:
            raise ParseError(f"loop bound must be a positive integer, got {n.text}", n.line, n.col)
        sid = self.fresh_sid()
        body = self.block()
        return While(sid=sid, line=tok.line, cond=cond, bound=int(n.text), body=body)

    def work_stmt(self) -> Stmt:
        tok = self.take("work")
        self.take_op("(")
        n = self.take("number")
        self.take_op(")")
        sid = self.fresh_sid()
        self.take_op(";")
        return Work(sid=sid, line=tok.line, cost=Fraction(n.text))

    def call_stmt(self) -> Stmt:
        tok = self.take("call")
        callee = self.take("ident")
        self.take_op("(")
        args: list[Expr] = []
        if not self.at_op(")"):
            args.append(self.expr())
            while self.at_op(","):
                self.take_op(",")
                args.append(self.expr())
        self.take_op(")")
        sid = self.fresh_sid()
        self.take_op(";")
        return Call(sid=sid, line=tok.line, callee=callee.text, args=tuple(args))

    # --- expressions ----------------------------------------------------

    def expr(self) -> Expr:
        e = self.and_expr()
        while self.at_op("||"):
            self.take_op("||")
            e = Or(e, self.and_expr())
        return e

    def and_expr(self) -> Expr:
        e = self.unary()
        while self.at_op("&&"):
            self.take_op("&&")
            e = And(e, self.unary())
        return e

    def unary(self) -> Expr:
        tok = self.peek()
        if self.at_op("!"):
            self.take_op("!")
            return Not(self.unary())
        if tok.kind == "true":
            self.take("true")
            return Lit(True)
        if tok.kind == "false":
            self.take("false")
            return Lit(False)
        if self.at_op("("):
            self.take_op("(")
            e = self.expr()
            self.take_op(")")
            return e
        if tok.kind == "ident":
            return Var(self._var_name())
        raise ParseError(f"expected expression, found {tok.text or 'end of input'!r}", tok.line, tok.col)


def parse(src: str, source_name: str = "<string>") -> Program:
    return _Parser(src, source_name).program()


def parse_file(path: str) -> Program:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read(), source_name=path)


# --- static validation ---------------------------------------------------


def _validate(prog: Program) -> None:
    if len(set(prog.options)) != len(prog.options):
        raise ParseError("duplicate option name in options header", 1)
    if prog.entry not in prog.functions:
        raise ParseError(f"missing entry function {prog.entry!r}", 1)
    if prog.functions[prog.entry].params:
        raise ParseError(f"entry function {prog.entry!r} must take no parameters", 1)
    for fn in prog.functions.values():
        _check_returns(fn)
        _check_defined(prog, fn)
    _check_acyclic(prog)


def _check_returns(fn: Function) -> None:
    def scan(stmts: tuple[Stmt, ...], tail_of_body: bool) -> None:
        for i, s in enumerate(stmts):
            if isinstance(s, Return):
                if not (tail_of_body and i == len(stmts) - 1):
                    raise ParseError(f"return must be the last statement of {fn.name!r}", s.line)
            elif isinstance(s, If):
                scan(s.then, False)
                scan(s.orelse, False)
            elif isinstance(s, While):
                scan(s.body, False)

    scan(fn.body, True)


def _check_defined(prog: Program, fn: Function) -> None:
    """Every variable read must be assigned on all paths reaching the read."""

    def use(expr: Expr, defined: frozenset[str], line: int) -> None:
        for name in expr.vars():
            if name not in defined:
                raise ParseError(f"variable {name!r} may be unassigned here", line)

    def flow(stmts: tuple[Stmt, ...], defined: frozenset[str]) -> frozenset[str]:
        for s in stmts:
            if isinstance(s, OptionRead):
                if s.option not in prog.options:
                    raise ParseError(f"undeclared option {s.option!r}", s.line)
                defined |= {s.var}
            elif isinstance(s, Assign):
                use(s.expr, defined, s.line)
                defined |= {s.var}
            elif isinstance(s, Call):
                target = prog.functions.get(s.callee)
                if target is None:
                    raise ParseError(f"call to undefined function {s.callee!r}", s.line)
                if len(s.args) != len(target.params):
                    raise ParseError(
                        f"{s.callee!r} takes {len(target.params)} arguments, got {len(s.args)}", s.line
                    )
                for a in s.args:
                    use(a, defined, s.line)
            elif isinstance(s, If):
                use(s.cond, defined, s.line)
                after_then = flow(s.then, defined)
                after_else = flow(s.orelse, defined)
                defined = after_then & after_else
            elif isinstance(s, While):
                use(s.cond, defined, s.line)
                flow(s.body, defined)  # body may run zero times: defs don't escape
        return defined

    flow(fn.body, frozenset(fn.params))


def _check_acyclic(prog: Program) -> None:
    from .callgraph import call_graph_cycle

    cycle = call_graph_cycle(prog)
    if cycle:
        raise ParseError("recursive calls are not allowed: " + " -> ".join(cycle), 1)
