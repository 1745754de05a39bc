"""Black-box sampling and modeling strategies to compare against.

All of them look only at end-to-end times.  Brute force measures every
configuration; feature-wise measures each option alone; pair-wise measures a
strength-2 covering array and fits a degree-2 model; the read-tree explorers
discover reachable option-read sequences at runtime (reading options eagerly
where they are loaded, or lazily where their values are first needed) and
measure one configuration per sequence.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .interp import run
from .lang import Program
from .model import GlobalModel

Config = frozenset[str]

BRUTE_FORCE_CAP = 22


@dataclass
class BaselineResult:
    """What a strategy measured and how it predicts."""

    name: str
    configurations: list[Config]
    runs: int
    predict: Callable[[Config], Fraction]
    model: GlobalModel | None = None
    details: dict = field(default_factory=dict)


def all_configurations(options: Sequence[str]) -> list[Config]:
    """Every configuration, binary-counter order, first option most
    significant."""
    n = len(options)
    return [
        frozenset(options[j] for j in range(n) if (i >> (n - 1 - j)) & 1)
        for i in range(1 << n)
    ]


def _measure_end_to_end(
    program: Program, configs: Sequence[Config], jobs: int = 1
) -> dict[Config, Fraction]:
    def one(c: Config) -> Fraction:
        return run(program, c).end_to_end

    if jobs > 1 and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            times = list(pool.map(one, configs))
    else:
        times = [one(c) for c in configs]
    return dict(zip(configs, times))


def exhaustive_times(program: Program, *, jobs: int = 1) -> dict[Config, Fraction]:
    """End-to-end time of every configuration; the ground truth."""
    n = len(program.options)
    if n > BRUTE_FORCE_CAP:
        raise ValueError(
            f"{n} options means {1 << n} configurations; "
            f"refusing beyond 2^{BRUTE_FORCE_CAP}"
        )
    return _measure_end_to_end(program, all_configurations(program.options), jobs)


def brute_force(program: Program, *, jobs: int = 1) -> BaselineResult:
    table = exhaustive_times(program, jobs=jobs)

    def predict(c: Config) -> Fraction:
        return table[c]

    return BaselineResult(
        name="brute-force",
        configurations=list(table),
        runs=len(table),
        predict=predict,
        details={"table": table},
    )


def feature_wise(program: Program, *, jobs: int = 1) -> BaselineResult:
    """Measure the empty configuration plus each option alone."""
    opts = program.options
    configs: list[Config] = [frozenset()] + [frozenset({o}) for o in opts]
    times = _measure_end_to_end(program, configs, jobs)
    base = times[frozenset()]
    terms: dict[frozenset[str], Fraction] = {frozenset(): base}
    for o in opts:
        terms[frozenset({o})] = times[frozenset({o})] - base
    model = GlobalModel(options=opts, terms=terms)
    return BaselineResult(
        name="feature-wise",
        configurations=configs,
        runs=len(configs),
        predict=model.predict,
        model=model,
    )


# -- pair-wise covering array -------------------------------------------------


def pairwise_rows(options: Sequence[str]) -> list[Config]:
    """A strength-2 covering array over boolean options.

    Greedy: seed each candidate row with one uncovered pair, fill the rest to
    cover as many further pairs as possible, keep the best row. Every row
    covers at least its seed, so this terminates; the result is certified by
    `verify_pairwise`.
    """
    opts = list(options)
    if not opts:
        return [frozenset()]
    if len(opts) == 1:
        return [frozenset(), frozenset(opts)]
    uncovered: set[tuple[str, str, bool, bool]] = set()
    for o1, o2 in combinations(opts, 2):
        for v1 in (False, True):
            for v2 in (False, True):
                uncovered.add((o1, o2, v1, v2))

    def gain(row: dict[str, bool]) -> int:
        return sum(
            1
            for (o1, o2, v1, v2) in uncovered
            if o1 in row and o2 in row and row[o1] == v1 and row[o2] == v2
        )

    rows: list[Config] = []
    while uncovered:
        best_row: dict[str, bool] | None = None
        best_gain = -1
        for seed in sorted(uncovered)[:50]:
            o1, o2, v1, v2 = seed
            row = {o1: v1, o2: v2}
            for o in opts:
                if o in row:
                    continue
                scores = []
                for v in (False, True):
                    trial = dict(row)
                    trial[o] = v
                    scores.append((gain(trial), v))
                scores.sort(key=lambda sv: (-sv[0], sv[1]))
                row[o] = scores[0][1]
            g = gain(row)
            if g > best_gain:
                best_gain = g
                best_row = row
        assert best_row is not None
        rows.append(frozenset(o for o, v in best_row.items() if v))
        uncovered = {
            (o1, o2, v1, v2)
            for (o1, o2, v1, v2) in uncovered
            if not ((o1 in best_row) and (o2 in best_row)
                    and best_row[o1] == v1 and best_row[o2] == v2)
        }
    return rows


def verify_pairwise(rows: Iterable[Config], options: Sequence[str]) -> bool:
    rows = list(rows)
    for o1, o2 in combinations(options, 2):
        seen = {(o1 in r, o2 in r) for r in rows}
        if len(seen) != 4:
            return False
    return True


def pair_wise(program: Program, *, jobs: int = 1) -> BaselineResult:
    rows = pairwise_rows(program.options)
    if len(program.options) >= 2 and not verify_pairwise(rows, program.options):
        raise AssertionError("covering array construction failed its certificate")
    times = _measure_end_to_end(program, rows, jobs)
    model = learn_model(rows, [times[r] for r in rows], program.options, degree=2)
    return BaselineResult(
        name="pair-wise",
        configurations=rows,
        runs=len(rows),
        predict=model.predict,
        model=model,
    )


# -- forward-selection learner -------------------------------------------------


def learn_model(
    configs: Sequence[Config],
    times: Sequence[Fraction],
    options: Sequence[str],
    *,
    degree: int = 2,
    tolerance: float = 1e-4,
) -> GlobalModel:
    """Fit a term model by forward selection and least squares.

    Candidate terms are all option subsets up to `degree`; terms join the
    model while they reduce the residual sum of squares by more than
    `tolerance` relative to the previous fit. Ties go to the smaller,
    lexicographically first term.
    """
    y = np.array([float(t) for t in times], dtype=float)
    pool: list[frozenset[str]] = []
    for k in range(1, degree + 1):
        for combo in combinations(options, k):
            pool.append(frozenset(combo))

    def column(term: frozenset[str]) -> np.ndarray:
        return np.array([1.0 if term <= c else 0.0 for c in configs], dtype=float)

    selected: list[frozenset[str]] = [frozenset()]
    matrix = [np.ones(len(configs))]
    coef, *_ = np.linalg.lstsq(np.column_stack(matrix), y, rcond=None)
    rss = float(np.sum((np.column_stack(matrix) @ coef - y) ** 2))

    while pool:
        best = None
        for term in pool:
            x = np.column_stack(matrix + [column(term)])
            c, _, rank, _ = np.linalg.lstsq(x, y, rcond=None)
            if rank < x.shape[1]:
                continue
            r = float(np.sum((x @ c - y) ** 2))
            if best is None or r < best[0] - 1e-12:
                best = (r, term, c)
        if best is None:
            break
        new_rss, term, c = best
        denom = rss if rss > 0 else 1.0
        if (rss - new_rss) / denom < tolerance:
            break
        selected.append(term)
        matrix.append(column(term))
        coef, rss = c, new_rss
        pool.remove(term)
        if rss <= 1e-12:
            break

    terms = {
        t: Fraction(str(round(float(v), 6)))
        for t, v in zip(selected, coef)
    }
    return GlobalModel(options=tuple(options), terms=terms)


# -- runtime read-tree exploration ----------------------------------------------


def _explore(program: Program, lazy: bool) -> list[tuple[tuple[tuple[str, bool], ...], Fraction]]:
    """Depth-first walk of the option-read decision tree.

    Fresh reads start disabled; backtracking flips the deepest disabled
    decision and drops everything after it.
    """
    leaves: list[tuple[tuple[tuple[str, bool], ...], Fraction]] = []
    prefix: list[tuple[str, bool]] = []
    while True:
        seq: list[tuple[str, bool]] = []
        assigned: dict[str, bool] = {}

        def reader(option: str) -> bool:
            if option in assigned:
                return assigned[option]
            if len(seq) < len(prefix):
                value = prefix[len(seq)][1]
            else:
                value = False
            assigned[option] = value
            seq.append((option, value))
            return value

        res = run(program, frozenset(), reader=reader, lazy=lazy)
        leaves.append((tuple(seq), res.end_to_end))
        i = len(seq) - 1
        while i >= 0 and seq[i][1]:
            i -= 1
        if i < 0:
            return leaves
        prefix = [*seq[:i], (seq[i][0], True)]


def splat(program: Program, *, lazy: bool = True) -> BaselineResult:
    leaves = _explore(program, lazy)
    configs = [
        frozenset(o for o, v in seq if v) for seq, _ in leaves
    ]

    def predict(c: Config) -> Fraction:
        for seq, t in leaves:
            if all((o in c) == v for o, v in seq):
                return t
        raise LookupError(f"no explored read sequence matches {sorted(c)}")

    return BaselineResult(
        name="splat-lazy" if lazy else "splat",
        configurations=configs,
        runs=len(leaves),
        predict=predict,
        details={"leaves": leaves},
    )
