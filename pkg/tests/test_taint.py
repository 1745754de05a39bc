"""Influence analysis: worked examples plus a brute-force soundness oracle.

The oracle: if two configurations agree on every option in a statement's
influence set, the statement must execute the same number of times and book
the same work in both runs.
"""

from itertools import product

import pytest

from ccrush import analyze, parse
from ccrush.interp import run
from ccrush.lang import OptionRead

from conftest import random_program


def _by_kind(program, fn, kind, index=0):
    hits = [s for s in program.functions[fn].body if type(s).__name__ == kind]
    return hits[index]


def test_short_example_influences(short_program):
    si = analyze(short_program)
    main = short_program.functions["main"].body
    foo = short_program.functions["foo"].body
    work_base, ra, rb, rc, assign_x, if_a, call_foo, if_bx = main
    assert si[work_base.sid] == frozenset()
    assert si[ra.sid] == frozenset()
    assert si[assign_x.sid] == frozenset()
    assert si[if_a.sid] == frozenset("A")
    assert si[if_a.then[0].sid] == frozenset("A")
    assert si[if_a.then[1].sid] == frozenset("A")
    assert si[call_foo.sid] == frozenset()
    assert si[if_bx.sid] == frozenset("AB")
    assert si[if_bx.then[0].sid] == frozenset("AB")
    if_p = foo[0]
    assert si[if_p.sid] == frozenset("AC")
    assert si[if_p.then[0].sid] == frozenset("AC")


def test_full_example_interactions(full_program):
    si = analyze(full_program)
    got = si.interactions()
    expected = {frozenset(x) for x in ["A", "B", "C", "D", "E", "F", "G", "H", "I", "AB", "AC", "DEF"]}
    assert got == expected
    # J is read but influences nothing
    assert not any("J" in i for i in got)


def test_unreferenced_option_influences_nothing():
    p = parse('options A;\nfn main() { a := opt("A"); work(5); }')
    si = analyze(p)
    assert all(si[s.sid] == frozenset() for s in p.statements())


def test_influence_through_copies_and_calls():
    p = parse(
        """
options A;

fn main() {
  a := opt("A");
  x := a;
  y := x;
  if (y) {
    work(1);
  }
}
"""
    )
    si = analyze(p)
    work = _by_kind(p, "main", "If").then[0]
    assert si[work.sid] == frozenset("A")


def test_call_argument_binds_taint_per_call_site():
    p = parse(
        """
options A, B;

fn main() {
  a := opt("A");
  b := opt("B");
  call f(a);
  call f(b);
}

fn f(p) {
  if (p) {
    work(1);
  }
}
"""
    )
    si = analyze(p)
    body = _by_kind(p, "f", "If")
    assert si[body.sid] == frozenset("AB")  # union over both call sites


def test_loop_taint_reaches_fixpoint():
    # x picks up A only through the second iteration's assignment chain
    p = parse(
        """
options A;

fn main() {
  a := opt("A");
  x := false;
  y := false;
  go := true;
  while (go) bound 3 {
    if (x) {
      work(7);
    }
    x := y;
    y := a;
    go := false;
  }
}
"""
    )
    si = analyze(p)
    loop = _by_kind(p, "main", "While")
    inner_if = loop.body[0]
    assert si[inner_if.then[0].sid] == frozenset("A")


def test_pc_taint_restored_after_join(short_program):
    si = analyze(short_program)
    main = short_program.functions["main"].body
    call_foo = main[6]  # first statement after the if(a) join
    assert si[call_foo.sid] == frozenset()


def _profiles(program, config):
    res = run(program, config, count_statements=True)
    return {
        sid: (res.stmt_counts.get(sid, 0), (res.stmt_work or {}).get(sid))
        for sid in program.statement_ids()
    }


def _soundness_check(program):
    si = analyze(program)
    options = program.options
    configs = [
        frozenset(o for o, v in zip(options, bits) if v)
        for bits in product([False, True], repeat=len(options))
    ]
    profiles = {c: _profiles(program, c) for c in configs}
    for sid in program.statement_ids():
        inf = si[sid]
        groups = {}
        for c in configs:
            groups.setdefault(c & inf, []).append(c)
        for group in groups.values():
            first = profiles[group[0]][sid]
            for other in group[1:]:
                assert profiles[other][sid] == first, (
                    f"{program.source_name}: statement {sid} with influence "
                    f"{sorted(inf)} behaved differently within {sorted(group[0] & inf)}"
                )


def test_soundness_oracle_on_corpus(corpus_programs):
    for name, program in corpus_programs.items():
        if name == "deep-loop.ccl":
            continue  # thousands of iterations x 2 configs; covered separately
        _soundness_check(program)


def test_soundness_oracle_on_deep_loop(deep_loop_program):
    _soundness_check(deep_loop_program)


@pytest.mark.parametrize("seed", range(30))
def test_soundness_oracle_on_random_programs(seed):
    _soundness_check(random_program(seed, n_options=4))


def test_analyze_is_deterministic(full_program):
    a = analyze(full_program).to_json()
    b = analyze(full_program).to_json()
    assert a == b


def test_every_statement_has_an_entry(corpus_programs):
    for program in corpus_programs.values():
        si = analyze(program)
        for s in program.statements():
            si[s.sid]  # raises if missing


def test_option_read_itself_not_influenced(short_program):
    si = analyze(short_program)
    for s in short_program.statements():
        if isinstance(s, OptionRead):
            assert si[s.sid] == frozenset()
