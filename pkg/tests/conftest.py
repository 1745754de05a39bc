import random

import pytest

from ccrush import analyze, compress, corpus, identify_regions, optimize, parse
from ccrush.interp import measure


@pytest.fixture(scope="session")
def short_program():
    return corpus.load_program("running-example-short.ccl")


@pytest.fixture(scope="session")
def full_program():
    return corpus.load_program("running-example.ccl")


@pytest.fixture(scope="session")
def deep_loop_program():
    return corpus.load_program("deep-loop.ccl")


@pytest.fixture(scope="session")
def corpus_programs():
    return {name: corpus.load_program(name) for name in corpus.names()}


@pytest.fixture(scope="session")
def short_pipeline(short_program):
    return _pipeline(short_program)


@pytest.fixture(scope="session")
def full_pipeline(full_program):
    return _pipeline(full_program)


def _pipeline(program):
    si = analyze(program)
    region_set, simap = optimize(program, si)
    cc = compress(si.interactions(), program.options)
    perf = measure(program, cc.configurations, region_set)
    return si, region_set, cc, perf


def region_by_options(region_set, options):
    """The unique non-base region with exactly this option set."""
    hits = [r for r in region_set.regions if r.options == frozenset(options)]
    assert len(hits) == 1, f"expected one region for {options}, found {len(hits)}"
    return hits[0]


# -- random program generation ---------------------------------------------------


class _Gen:
    """Seeded generator for valid programs: definite assignment mirrors the
    validator, loops always terminate within their bound, calls are acyclic."""

    def __init__(self, seed: int, n_options: int):
        self.rng = random.Random(seed)
        self.options = [chr(ord("A") + i) for i in range(n_options)]
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    def expr(self, defined: list[str], depth: int = 0) -> str:
        choices = ["lit", "lit"]
        if defined:
            choices += ["var"] * 4
        if depth < 2:
            choices += ["not", "and", "or"]
        kind = self.rng.choice(choices)
        if kind == "var":
            return self.rng.choice(defined)
        if kind == "lit":
            return self.rng.choice(["true", "false"])
        if kind == "not":
            return f"!{self.expr(defined, depth + 1)}"
        a = self.expr(defined, depth + 1)
        b = self.expr(defined, depth + 1)
        op = "&&" if kind == "and" else "||"
        return f"({a} {op} {b})"

    def block(self, defined: list[str], depth: int, callees: list[tuple[str, int]], budget: int) -> tuple[list[str], list[str]]:
        lines: list[str] = []
        local = list(defined)
        n = self.rng.randint(1, max(1, budget))
        for _ in range(n):
            kinds = ["assign", "work", "read"]
            if depth < 2:
                kinds += ["if", "while"]
            if callees:
                kinds.append("call")
            kind = self.rng.choice(kinds)
            if kind == "read":
                v = self.fresh()
                o = self.rng.choice(self.options)
                lines.append(f'{v} := opt("{o}");')
                local.append(v)
            elif kind == "assign":
                v = self.fresh()
                lines.append(f"{v} := {self.expr(local)};")
                local.append(v)
            elif kind == "work":
                lines.append(f"work({self.rng.randint(1, 50)});")
            elif kind == "call":
                name, arity = self.rng.choice(callees)
                args = ", ".join(self.expr(local) for _ in range(arity))
                lines.append(f"call {name}({args});")
            elif kind == "if":
                then, _ = self.block(local, depth + 1, callees, budget // 2)
                body = ["  " + l for l in then]
                if self.rng.random() < 0.4:
                    other, _ = self.block(local, depth + 1, callees, budget // 2)
                    body += ["} else {"] + ["  " + l for l in other]
                lines.append(f"if ({self.expr(local)}) {{")
                lines += body
                lines.append("}")
            elif kind == "while":
                v = self.fresh()
                lines.append(f"{v} := {self.expr(local)};")
                local.append(v)
                inner, _ = self.block(local, depth + 1, callees, budget // 2)
                lines.append(f"while ({v}) bound 2 {{")
                lines += ["  " + l for l in inner]
                lines.append(f"  {v} := false;")
                lines.append("}")
        return lines, local


def random_source(seed: int, n_options: int = 4, helpers: int = 2) -> str:
    g = _Gen(seed, n_options)
    out = ["options " + ", ".join(g.options) + ";", ""]
    callees: list[tuple[str, int]] = []
    for i in range(g.rng.randint(0, helpers)):
        name = f"h{i}"
        arity = g.rng.randint(0, 2)
        params = [g.fresh() for _ in range(arity)]
        body, _ = g.block(params, 1, list(callees), 4)
        out.append(f"fn {name}({', '.join(params)}) {{")
        out += ["  " + l for l in body]
        out.append("}")
        out.append("")
        callees.append((name, arity))
    body, _ = g.block([], 0, callees, 8)
    out.append("fn main() {")
    out += ["  " + l for l in body]
    out.append("}")
    return "\n".join(out) + "\n"


def random_program(seed: int, n_options: int = 4, helpers: int = 2):
    return parse(random_source(seed, n_options, helpers), source_name=f"random-{seed}")
