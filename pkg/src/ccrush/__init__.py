"""White-box performance-influence modeling for configurable programs.

Pipeline: parse -> option-influence analysis -> instrumentation regions ->
compressed configuration set -> measured runs on a virtual clock -> local and
global performance models.  Black-box baselines and a comparison harness live
alongside for benchmarking.
"""

from .baselines import (
    BaselineResult,
    brute_force,
    exhaustive_times,
    feature_wise,
    learn_model,
    pair_wise,
    pairwise_rows,
    splat,
    verify_pairwise,
)
from .compress import CompressedSet, compress, compress_full_example, verify_coverage
from .influence import EMPTY, InfluenceMap, Options, analyze, expr_taint
from .interp import (
    LoopBoundExceeded,
    PerformanceMap,
    RegionBalanceError,
    RunResult,
    measure,
    run,
)
from .lang import ParseError, Program, parse, parse_file, to_source
from .model import (
    INFLUENCED,
    NEGLIGIBLE,
    NON_NEGLIGIBLE,
    GlobalModel,
    LocalModel,
    ModelSet,
    build_local,
    build_models,
    classify_regions,
    interaction_degrees,
    mape,
)
from .regions import (
    Region,
    RegionSet,
    identify_regions,
    merge_ok,
    optimize,
    propagate_down,
    propagate_up,
)
from .report import APPROACHES, Comparison, compare, ground_truth

__version__ = "0.1.0"

__all__ = [
    "APPROACHES",
    "BaselineResult",
    "CompressedSet",
    "Comparison",
    "EMPTY",
    "GlobalModel",
    "INFLUENCED",
    "InfluenceMap",
    "LocalModel",
    "LoopBoundExceeded",
    "ModelSet",
    "NEGLIGIBLE",
    "NON_NEGLIGIBLE",
    "Options",
    "ParseError",
    "PerformanceMap",
    "Program",
    "Region",
    "RegionBalanceError",
    "RegionSet",
    "RunResult",
    "analyze",
    "brute_force",
    "build_local",
    "build_models",
    "classify_regions",
    "compare",
    "compress",
    "compress_full_example",
    "exhaustive_times",
    "expr_taint",
    "feature_wise",
    "ground_truth",
    "identify_regions",
    "interaction_degrees",
    "learn_model",
    "mape",
    "measure",
    "merge_ok",
    "optimize",
    "pair_wise",
    "pairwise_rows",
    "parse",
    "parse_file",
    "propagate_down",
    "propagate_up",
    "run",
    "splat",
    "to_source",
    "verify_coverage",
    "verify_pairwise",
]
