"""Compress the configuration space down to what the interactions require.

Only subsets of observed interactions change region timings, so it suffices to
sample every value combination of every interaction.  Subset interactions ride
along for free inside larger ones; the remaining maximal interaction sets are
enumerated exhaustively and then merged pairwise around their shared options,
so one configuration serves several interactions at once.  For disjoint sets
the merge is a positional zip.  Options outside every interaction never vary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

Config = frozenset[str]


@dataclass
class CompressedSet:
    options: tuple[str, ...]
    configurations: list[Config]
    interactions: frozenset[frozenset[str]]

    def __len__(self) -> int:
        return len(self.configurations)

    def to_json(self) -> str:
        payload = {
            "options": list(self.options),
            "configurations": [sorted(c) for c in self.configurations],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        lines = [",".join(self.options)]
        for c in self.configurations:
            lines.append(",".join("true" if o in c else "false" for o in self.options))
        return "\n".join(lines) + "\n"


def _combinations(optset: frozenset[str]) -> list[Config]:
    """All value combinations, binary-counter order, first option most
    significant."""
    opts = sorted(optset)
    n = len(opts)
    out = []
    for i in range(1 << n):
        out.append(frozenset(opts[j] for j in range(n) if (i >> (n - 1 - j)) & 1))
    return out


def compress(io: Iterable[frozenset[str]], options: Sequence[str]) -> CompressedSet:
    universe = set(options)
    sets = {frozenset(i) for i in io if i}
    for i in sets:
        if not i <= universe:
            extra = ", ".join(sorted(i - universe))
            raise ValueError(f"interaction references undeclared options: {extra}")

    maximal = [s for s in sets if not any(s < t for t in sets)]
    maximal.sort(key=lambda s: (-len(s), tuple(sorted(s))))

    cs1: list[Config] = []
    o1: frozenset[str] = frozenset()
    for o2 in maximal:
        cs2 = _combinations(o2)
        pivot = o1 & o2
        used = [False] * len(cs2)
        merged: list[Config] = []
        for c1 in cs1:
            pv = c1 & pivot
            hit = None
            for j, c2 in enumerate(cs2):
                if not used[j] and (c2 & pivot) == pv:
                    hit = j
                    break
            if hit is None:
                merged.append(c1)
            else:
                used[hit] = True
                merged.append(c1 | cs2[hit])
        for j, c2 in enumerate(cs2):
            if not used[j]:
                merged.append(c2)
        cs1 = merged
        o1 = o1 | o2

    if not cs1:
        cs1 = [frozenset()]
    return CompressedSet(options=tuple(options), configurations=cs1, interactions=frozenset(sets))


def verify_coverage(configurations: Iterable[Config], io: Iterable[frozenset[str]]) -> bool:
    """Does the set project onto every value combination of every interaction?"""
    configs = list(configurations)
    for i in io:
        if not i:
            continue
        seen = {c & i for c in configs}
        if len(seen) != (1 << len(i)):
            return False
    return True


def compress_full_example() -> CompressedSet:
    """Compressed set for the bundled running example."""
    from .corpus import load_program
    from .influence import analyze

    program = load_program("running-example.ccl")
    si = analyze(program)
    return compress(si.interactions(), program.options)
