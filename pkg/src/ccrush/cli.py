"""Command line front end.

Exit codes: 0 on success, 1 when parsing, analysis, or execution fails,
2 for command line usage errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import report as report_mod
from .compress import compress
from .influence import InfluenceMap, analyze
from .interp import LoopBoundExceeded, RegionBalanceError, measure, run
from .lang import (
    Assign,
    Call,
    If,
    OptionRead,
    ParseError,
    Program,
    Return,
    While,
    Work,
    expr_source,
    parse,
)
from .model import build_models
from .regions import RegionSet, identify_regions, optimize


class UsageError(Exception):
    pass


def _load(path: str) -> tuple[Program, str]:
    source = Path(path).read_text()
    return parse(source, source_name=Path(path).name), source


def _fmt_ms(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return format(float(value), "g")


def _optset(options) -> str:
    return "{" + ",".join(sorted(options)) + "}"


def _stmt_summary(s) -> str:
    if isinstance(s, OptionRead):
        return f'{s.var} := opt("{s.option}")'
    if isinstance(s, Assign):
        return f"{s.var} := {expr_source(s.expr)}"
    if isinstance(s, Work):
        return f"work({_fmt_ms(s.cost)})"
    if isinstance(s, Call):
        return f"call {s.callee}({', '.join(expr_source(a) for a in s.args)})"
    if isinstance(s, Return):
        return "return"
    if isinstance(s, If):
        return f"if ({expr_source(s.cond)})"
    if isinstance(s, While):
        return f"while ({expr_source(s.cond)}) bound {s.bound}"
    return repr(s)


def _parse_config(text: str, program: Program) -> frozenset[str]:
    names = frozenset(t.strip() for t in text.split(",") if t.strip())
    unknown = names - set(program.options)
    if unknown:
        raise UsageError(
            f"unknown options in --config: {', '.join(sorted(unknown))}"
        )
    return names


def _regions_for(program: Program, si: InfluenceMap, optimized: bool) -> RegionSet:
    if optimized:
        region_set, _ = optimize(program, si)
        return region_set
    return identify_regions(program, si)


# -- subcommands -----------------------------------------------------------------


def _cmd_analyze(args) -> int:
    program, _ = _load(args.file)
    si = analyze(program)
    if args.json:
        sys.stdout.write(si.to_json())
        return 0
    print(f"statement influences for {program.source_name}")
    for s in program.statements():
        fn = program.function_of(s.sid)
        print(f"{s.sid:>4}  {fn}:{s.line:<3} {_optset(si[s.sid]):<12} {_stmt_summary(s)}")
    return 0


def _cmd_regions(args) -> int:
    program, _ = _load(args.file)
    si = analyze(program)
    region_set = _regions_for(program, si, not args.no_optimize)
    if args.json:
        sys.stdout.write(region_set.to_json())
        return 0

    def edges(es):
        return "[" + " ".join(f"{a}->{b}" for a, b in sorted(es, key=lambda t: (str(t[0]), str(t[1])))) + "]"

    print(f"base {region_set.base.rid}")
    for r in region_set.regions:
        print(
            f"{r.rid}  {r.function}  {_optset(r.options):<12} "
            f"start={edges(r.start_edges)} end={edges(r.end_edges)}"
        )
    return 0


def _cmd_compress(args) -> int:
    program, _ = _load(args.file)
    si = analyze(program)
    cc = compress(si.interactions(), program.options)
    if args.json:
        sys.stdout.write(cc.to_json())
    elif args.csv:
        sys.stdout.write(cc.to_csv())
    else:
        print(
            f"{len(cc.configurations)} of {1 << len(program.options)} "
            f"configurations cover {len(cc.interactions)} interactions"
        )
        for c in cc.configurations:
            print("  " + (",".join(sorted(c)) if c else "(none)"))
    return 0


def _cmd_run(args) -> int:
    program, _ = _load(args.file)
    config = _parse_config(args.config, program)
    si = analyze(program)
    region_set = _regions_for(program, si, not args.no_optimize)
    result = run(program, config, region_set=region_set, clock=args.clock)
    if args.json:
        import json

        payload = {
            "configuration": sorted(config),
            "end_to_end_ms": str(result.end_to_end),
            "events": result.events,
            "regions": [
                {
                    "id": r.rid,
                    "options": sorted(r.options),
                    "time_ms": str(result.region_times[r.rid]),
                    "events": result.region_events[r.rid],
                }
                for r in region_set.all_regions()
            ],
        }
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return 0
    shown = ",".join(sorted(config)) if config else "(none)"
    print(f"configuration: {shown}")
    print(f"end-to-end: {_fmt_ms(result.end_to_end)} ms in {result.events} region events")
    for r in region_set.all_regions():
        label = "base" if r.rid == region_set.base.rid else _optset(r.options)
        print(f"  {r.rid}  {label:<12} {_fmt_ms(result.region_times[r.rid]):>10} ms")
    return 0


def _cmd_model(args) -> int:
    program, _ = _load(args.file)
    si = analyze(program)
    region_set = _regions_for(program, si, not args.no_optimize)
    cc = compress(si.interactions(), program.options)
    perf = measure(program, cc.configurations, region_set, jobs=args.jobs)
    models = build_models(region_set, perf)
    if args.json:
        sys.stdout.write(models.global_model.to_json())
        return 0
    print(f"measured {len(cc.configurations)} configurations")
    print(f"global model (s): {models.global_model.render()}")
    for r in region_set.all_regions():
        label = "base" if r.rid == region_set.base.rid else _optset(r.options)
        print(f"  {r.rid}  {label:<12} {models.region_models[r.rid].render()}")
    return 0


def _cmd_groundtruth(args) -> int:
    program, source = _load(args.file)
    times, path, hit = report_mod.ground_truth(
        program, source, cache_dir=args.cache, jobs=args.jobs
    )
    if args.json:
        import json

        payload = {
            "source_sha256": report_mod.source_digest(source),
            "times_ms": {",".join(sorted(c)): str(t) for c, t in times.items()},
        }
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return 0
    print(f"{len(times)} configurations measured")
    if path is not None:
        print(f"cache {'hit' if hit else 'written'}: {path}")
    return 0


def _cmd_compare(args) -> int:
    program, source = _load(args.file)
    approaches = [t.strip() for t in args.approaches.split(",") if t.strip()]
    unknown = set(approaches) - set(report_mod.APPROACHES)
    if unknown:
        raise UsageError(
            f"unknown approaches: {', '.join(sorted(unknown))} "
            f"(choose from {', '.join(report_mod.APPROACHES)})"
        )
    truth = None
    if args.cache:
        truth, _, _ = report_mod.ground_truth(
            program, source, cache_dir=args.cache, jobs=args.jobs
        )
    comparison = report_mod.compare(program, approaches, jobs=args.jobs, truth=truth)
    if args.json:
        sys.stdout.write(comparison.to_json())
    elif args.csv:
        sys.stdout.write(comparison.to_csv())
    else:
        sys.stdout.write(comparison.to_text())
    return 0


# -- argument plumbing -------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ccrush",
        description="White-box performance-influence modeling for configurable programs.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def fmt_flags(sp, csv=False):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--json", action="store_true", help="machine readable output")
        if csv:
            g.add_argument("--csv", action="store_true", help="comma separated output")

    sp = sub.add_parser("analyze", help="per-statement option influence")
    sp.add_argument("file")
    fmt_flags(sp)
    sp.set_defaults(fn=_cmd_analyze)

    sp = sub.add_parser("regions", help="instrumentation regions")
    sp.add_argument("file")
    sp.add_argument("--no-optimize", action="store_true", help="skip region merging")
    fmt_flags(sp)
    sp.set_defaults(fn=_cmd_regions)

    sp = sub.add_parser("compress", help="covering configuration set")
    sp.add_argument("file")
    fmt_flags(sp, csv=True)
    sp.set_defaults(fn=_cmd_compress)

    sp = sub.add_parser("run", help="execute one configuration with region timers")
    sp.add_argument("file")
    sp.add_argument("--config", default="", help="comma separated enabled options")
    sp.add_argument("--no-optimize", action="store_true")
    sp.add_argument("--clock", choices=("virtual", "wall"), default="virtual")
    fmt_flags(sp)
    sp.set_defaults(fn=_cmd_run)

    sp = sub.add_parser("model", help="fit per-region and global models")
    sp.add_argument("file")
    sp.add_argument("--no-optimize", action="store_true")
    sp.add_argument("--jobs", type=int, default=1)
    fmt_flags(sp)
    sp.set_defaults(fn=_cmd_model)

    sp = sub.add_parser("groundtruth", help="measure every configuration (cached)")
    sp.add_argument("file")
    sp.add_argument("--cache", default=None, help="cache directory")
    sp.add_argument("--jobs", type=int, default=1)
    fmt_flags(sp)
    sp.set_defaults(fn=_cmd_groundtruth)

    sp = sub.add_parser("compare", help="cost and error of each approach")
    sp.add_argument("file")
    sp.add_argument(
        "--approaches",
        default=",".join(report_mod.APPROACHES),
        help=f"comma separated subset of: {', '.join(report_mod.APPROACHES)}",
    )
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--cache", default=None)
    fmt_flags(sp, csv=True)
    sp.set_defaults(fn=_cmd_compare)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"ccrush: {exc}", file=sys.stderr)
        return 2
    except (
        ParseError,
        LoopBoundExceeded,
        RegionBalanceError,
        ValueError,
        LookupError,
        OSError,
    ) as exc:
        print(f"ccrush: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
