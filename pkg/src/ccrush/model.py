"""Performance-influence models built from per-region measurements.

Each region gets a local model over exactly the options that influence it.
For an option subset T, t_T is the mean region time over all measured
configurations that project onto T; the coefficient of a term S follows by
inclusion-exclusion over the subsets of S.  Terms then say how much time the
term's option combination adds on top of its strict subsets.  The global
model is the term-wise sum of all local models, so it predicts end-to-end
time for any configuration, measured or not.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .influence import Options
from .interp import PerformanceMap
from .regions import RegionSet

Config = frozenset[str]

INFLUENCED = "option-influenced"
NEGLIGIBLE = "not-influenced-negligible"
NON_NEGLIGIBLE = "not-influenced-non-negligible"


def _subsets(options: Options) -> list[Options]:
    opts = sorted(options)
    out: list[Options] = []
    for k in range(len(opts) + 1):
        for combo in combinations(opts, k):
            out.append(frozenset(combo))
    return out


def _term_label(term: Options) -> str:
    return "*".join(sorted(term)) if term else "1"


def _render_terms(terms: Mapping[Options, Fraction], unit: str) -> str:
    scale = Fraction(1000) if unit == "s" else Fraction(1)
    parts = []
    for term in sorted(terms, key=lambda t: (len(t), tuple(sorted(t)))):
        coef = terms[term]
        if coef == 0:
            continue
        value = coef / scale
        num = format(float(value), "g")
        if not term:
            parts.append(num)
        elif value == 1:
            parts.append("*".join(sorted(term)))
        else:
            parts.append(num + "*" + "*".join(sorted(term)))
    return " + ".join(parts) if parts else "0"


@dataclass
class LocalModel:
    region_id: str
    options: Options
    terms: dict[Options, Fraction]

    def predict(self, config: Config) -> Fraction:
        total = Fraction(0)
        for term, coef in self.terms.items():
            if term <= config:
                total += coef
        return total

    def render(self, unit: str = "s") -> str:
        return _render_terms(self.terms, unit)


@dataclass
class GlobalModel:
    options: tuple[str, ...]
    terms: dict[Options, Fraction]

    def predict(self, config: Config) -> Fraction:
        total = Fraction(0)
        for term, coef in self.terms.items():
            if term <= config:
                total += coef
        return total

    def render(self, unit: str = "s") -> str:
        return _render_terms(self.terms, unit)

    def to_json(self) -> str:
        payload = {
            "options": list(self.options),
            "terms": [
                {"options": sorted(t), "coefficient_ms": str(c)}
                for t, c in sorted(
                    self.terms.items(), key=lambda kv: (len(kv[0]), tuple(sorted(kv[0])))
                )
                if c != 0 or not t
            ],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


@dataclass
class ModelSet:
    region_models: dict[str, LocalModel]
    global_model: GlobalModel


def build_local(region_id: str, options: Options, perf: PerformanceMap) -> LocalModel:
    """Fit one region's model from the measured samples.

    Requires every projection of the measured configurations onto the
    region's options to be present; the compressed configuration set
    guarantees that for regions whose influence it covers.
    """
    means: dict[Options, Fraction] = {}
    for t in _subsets(options):
        samples = [
            perf.region_times[c][region_id]
            for c in perf.configurations
            if (c & options) == t
        ]
        if not samples:
            missing = "{" + ", ".join(sorted(t)) + "}"
            raise ValueError(
                f"no measured configuration projects onto {missing} "
                f"for region {region_id}"
            )
        means[t] = sum(samples, Fraction(0)) / len(samples)

    terms: dict[Options, Fraction] = {}
    for s in _subsets(options):
        coef = Fraction(0)
        for t in _subsets(s):
            sign = -1 if (len(s) - len(t)) % 2 else 1
            coef += sign * means[t]
        terms[s] = coef
    return LocalModel(region_id=region_id, options=options, terms=terms)


def build_models(region_set: RegionSet, perf: PerformanceMap) -> ModelSet:
    """Local model per region (base included) plus their term-wise sum."""
    local: dict[str, LocalModel] = {}
    base = region_set.base
    local[base.rid] = build_local(base.rid, frozenset(), perf)
    for r in region_set.regions:
        local[r.rid] = build_local(r.rid, r.options, perf)

    global_terms: dict[Options, Fraction] = {}
    for m in local.values():
        for term, coef in m.terms.items():
            global_terms[term] = global_terms.get(term, Fraction(0)) + coef
    return ModelSet(
        region_models=local,
        global_model=GlobalModel(options=perf.options, terms=global_terms),
    )


def mape(predicted: Mapping[Config, Fraction], actual: Mapping[Config, Fraction]) -> Fraction:
    """Mean absolute percentage error over the configurations in `actual`."""
    if not actual:
        raise ValueError("no configurations to score")
    total = Fraction(0)
    for config, truth in actual.items():
        if truth == 0:
            raise ValueError("actual time is zero; percentage error is undefined")
        total += abs(predicted[config] - truth) / truth
    return total * 100 / len(actual)


def classify_regions(
    models: ModelSet,
    perf: PerformanceMap,
    threshold: Fraction = Fraction(5, 100),
) -> dict[str, str]:
    """Sort regions into influenced and (non-)negligible uninfluenced ones.

    A region is negligible when its time stays below `threshold` of the
    end-to-end time in every measured configuration.
    """
    out: dict[str, str] = {}
    for rid, m in models.region_models.items():
        if any(t and c != 0 for t, c in m.terms.items()):
            out[rid] = INFLUENCED
            continue
        small = all(
            perf.region_times[c][rid] <= perf.end_to_end[c] * threshold
            for c in perf.configurations
        )
        out[rid] = NEGLIGIBLE if small else NON_NEGLIGIBLE
    return out


def interaction_degrees(model: GlobalModel) -> tuple[int, int]:
    """Smallest and largest size of a non-constant term with non-zero weight."""
    sizes = [len(t) for t, c in model.terms.items() if t and c != 0]
    if not sizes:
        return (0, 0)
    return (min(sizes), max(sizes))
