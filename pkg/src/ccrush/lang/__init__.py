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
    expr_source,
    to_source,
    walk,
)
from .callgraph import call_edges, call_graph_cycle, call_sites, callee_first
from .cfg import ENTRY, EXIT, FALLTHROUGH, FALSE, LOOP_BACK, TRUE, Cfg, Edge, build_cfg
from .parser import ParseError, parse, parse_file

__all__ = [
    "And", "Assign", "Call", "Cfg", "Edge", "ENTRY", "EXIT", "Expr",
    "FALLTHROUGH", "FALSE", "Function", "If", "LOOP_BACK", "Lit", "Not",
    "OptionRead", "Or", "ParseError", "Program", "Return", "Stmt", "TRUE",
    "Var", "While", "Work", "build_cfg", "call_edges", "call_graph_cycle",
    "call_sites", "callee_first", "expr_source", "parse", "parse_file",
    "to_source", "walk",
]
