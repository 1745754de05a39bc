"""Acceptance gate: the contract this package is sold on, one check per test.

Every check pins observable behavior end to end; run with -v to get one
pass/fail line per criterion.
"""

import random
from fractions import Fraction

import pytest

from ccrush import (
    analyze,
    build_models,
    compress,
    identify_regions,
    mape,
    optimize,
    verify_coverage,
)
from ccrush.baselines import (
    brute_force,
    exhaustive_times,
    feature_wise,
    pair_wise,
    pairwise_rows,
    splat,
    verify_pairwise,
)
from ccrush.interp import run

from conftest import region_by_options


def _sets(*texts):
    return [frozenset(t) for t in texts]


def _nonzero(terms):
    return {t: c for t, c in terms.items() if c != 0}


@pytest.fixture(scope="module")
def full_truth(full_program):
    return exhaustive_times(full_program, jobs=4)


def test_c01_short_example_region_times_exact(short_pipeline):
    _, rs, cc, perf = short_pipeline
    assert cc.configurations == _sets("", "BC", "A", "ABC")
    rows = {
        rs.base.rid: (1000, 1000, 1000, 1000),
        region_by_options(rs, "AC").rid: (0, 0, 3000, 6000),
        region_by_options(rs, "AB").rid: (0, 0, 0, 3000),
    }
    for rid, expected in rows.items():
        got = tuple(perf.region_times[c][rid] for c in cc.configurations)
        assert got == expected


def test_c02_short_example_global_model_exact(short_pipeline):
    _, rs, _, perf = short_pipeline
    g = build_models(rs, perf).global_model
    assert _nonzero(g.terms) == {
        frozenset(): Fraction(1000),
        frozenset("A"): Fraction(3000),
        frozenset("AB"): Fraction(3000),
        frozenset("AC"): Fraction(3000),
    }
    assert g.predict(frozenset("ABC")) == 10000


def test_c03_full_example_compressed_set_exact(full_program):
    si = analyze(full_program)
    cc = compress(si.interactions(), full_program.options)
    assert cc.configurations == _sets(
        "", "BCFGHI", "AE", "ABCEF", "D", "DF", "DE", "DEF"
    )


def test_c04_full_example_model_exact_zero_mape(full_pipeline, full_truth):
    _, rs, _, perf = full_pipeline
    g = build_models(rs, perf).global_model
    expected = {frozenset(): Fraction(1000)}
    for opt, ms in zip("ABCDEFGHI", (3100, 200, 300, 400, 500, 600, 700, 800, 900)):
        expected[frozenset(opt)] = Fraction(ms)
    expected[frozenset("AB")] = Fraction(3000)
    expected[frozenset("AC")] = Fraction(3000)
    expected[frozenset("DEF")] = Fraction(5000)
    assert _nonzero(g.terms) == expected
    assert len(full_truth) == 1024
    assert mape({c: g.predict(c) for c in full_truth}, full_truth) == 0


def test_c05_full_example_instrumentation_overhead_bounded(full_program, full_pipeline):
    si, rs, cc, perf = full_pipeline
    unopt = identify_regions(full_program, si)
    for config in cc.configurations:
        assert perf.events[config] <= 22
        before = run(full_program, config, region_set=unopt).events
        assert perf.events[config] < before


def test_c06_region_times_sum_to_end_to_end(corpus_programs):
    for program in corpus_programs.values():
        si = analyze(program)
        rs, _ = optimize(program, si)
        cc = compress(si.interactions(), program.options)
        for config in cc.configurations:
            res = run(program, config, region_set=rs)
            assert sum(res.region_times.values(), Fraction(0)) == res.end_to_end


def test_c07_compression_covers_every_interaction(corpus_programs):
    for program in corpus_programs.values():
        si = analyze(program)
        cc = compress(si.interactions(), program.options)
        assert verify_coverage(cc.configurations, si.interactions())
    for seed in range(100):
        rng = random.Random(seed)
        universe = [chr(ord("A") + i) for i in range(rng.randint(1, 8))]
        io = [
            frozenset(rng.sample(universe, rng.randint(1, len(universe))))
            for _ in range(rng.randint(1, 6))
        ]
        cc = compress(io, universe)
        assert verify_coverage(cc.configurations, io)


def test_c08_loop_region_hoisting_cuts_events_10x(deep_loop_program):
    si = analyze(deep_loop_program)
    unopt = identify_regions(deep_loop_program, si)
    opt, _ = optimize(deep_loop_program, si)
    config = frozenset("A")
    before = run(deep_loop_program, config, region_set=unopt)
    after = run(deep_loop_program, config, region_set=opt)
    assert before.events / after.events >= 10
    assert before.end_to_end == after.end_to_end


def test_c09_baseline_costs_and_errors(full_program, full_pipeline, full_truth):
    _, rs, cc, perf = full_pipeline

    def err(predict):
        return mape({c: predict(c) for c in full_truth}, full_truth)

    g = build_models(rs, perf).global_model
    cc_runs = len(cc.configurations)
    assert cc_runs == 8
    assert err(g.predict) == 0

    bf = brute_force(full_program, jobs=4)
    assert bf.runs == 1024
    assert err(bf.predict) == 0

    fw = feature_wise(full_program)
    assert fw.runs == 11
    assert err(fw.predict) > 0

    pw = pair_wise(full_program)
    assert verify_pairwise(pw.configurations, full_program.options)
    assert len(pairwise_rows(("A", "B", "C"))) in (4, 5, 6)

    eager = splat(full_program, lazy=False)
    lazy = splat(full_program, lazy=True)
    assert eager.runs == 1024
    assert lazy.runs == 512
    assert lazy.runs < eager.runs
    assert err(eager.predict) == 0
    assert err(lazy.predict) == 0

    assert cc_runs < min(bf.runs, fw.runs, pw.runs, eager.runs, lazy.runs)


def test_c10_results_are_deterministic(full_program):
    from ccrush import corpus
    from ccrush.interp import measure
    from ccrush.lang import parse

    def pipeline_json():
        program = parse(corpus.source("running-example.ccl"))
        si = analyze(program)
        rs, _ = optimize(program, si)
        cc = compress(si.interactions(), program.options)
        perf = measure(program, cc.configurations, rs)
        models = build_models(rs, perf)
        rids = [rs.base.rid] + [r.rid for r in rs.regions]
        return rs.to_json(), cc.to_json(), models.global_model.to_json(), rids

    first = pipeline_json()
    second = pipeline_json()
    assert first == second
    si = analyze(full_program)
    rs, _ = optimize(full_program, si)
    assert [rs.base.rid] + [r.rid for r in rs.regions] == first[3]
