"""Cost/accuracy comparison of the modeling approaches, plus the ground-truth
cache that keeps exhaustive measurement from being repeated."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from . import baselines
from .compress import compress
from .influence import analyze
from .interp import measure
from .lang import Program
from .model import build_models, mape
from .regions import optimize

Config = frozenset[str]

APPROACHES = ("cc", "bf", "fw", "pw", "splat", "splat-lazy")


@dataclass
class ApproachReport:
    name: str
    runs: int
    mape_percent: Fraction
    model: str | None = None


@dataclass
class Comparison:
    program: str
    options: int
    total_configurations: int
    rows: list[ApproachReport]

    def to_json(self) -> str:
        payload = {
            "program": self.program,
            "options": self.options,
            "total_configurations": self.total_configurations,
            "approaches": [
                {
                    "name": r.name,
                    "runs": r.runs,
                    "mape_percent": str(r.mape_percent),
                    "model": r.model,
                }
                for r in self.rows
            ],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["approach,runs,mape_percent"]
        for r in self.rows:
            lines.append(f"{r.name},{r.runs},{float(r.mape_percent):g}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        width = max(len(r.name) for r in self.rows)
        lines = [
            f"{self.program}: {self.options} options, "
            f"{self.total_configurations} configurations",
            f"{'approach'.ljust(width)}  {'runs':>6}  mape",
        ]
        for r in self.rows:
            lines.append(
                f"{r.name.ljust(width)}  {r.runs:>6}  {float(r.mape_percent):g}%"
            )
        return "\n".join(lines) + "\n"


def _whitebox(program: Program, *, jobs: int = 1):
    si = analyze(program)
    region_set, _ = optimize(program, si)
    cc = compress(si.interactions(), program.options)
    perf = measure(program, cc.configurations, region_set, jobs=jobs)
    models = build_models(region_set, perf)
    return ApproachReport(
        name="cc",
        runs=len(cc.configurations),
        mape_percent=Fraction(0),
        model=models.global_model.render(),
    ), models


def compare(
    program: Program,
    approaches: Iterable[str] = APPROACHES,
    *,
    jobs: int = 1,
    truth: Mapping[Config, Fraction] | None = None,
) -> Comparison:
    """Run each approach, score its predictions against the ground truth."""
    wanted = list(approaches)
    unknown = set(wanted) - set(APPROACHES)
    if unknown:
        raise ValueError(f"unknown approaches: {', '.join(sorted(unknown))}")
    if truth is None:
        truth = baselines.exhaustive_times(program, jobs=jobs)

    rows: list[ApproachReport] = []
    for name in wanted:
        if name == "cc":
            report, models = _whitebox(program, jobs=jobs)
            predictions = {c: models.global_model.predict(c) for c in truth}
            report.mape_percent = mape(predictions, truth)
            rows.append(report)
            continue
        if name == "bf":
            result = baselines.brute_force(program, jobs=jobs)
        elif name == "fw":
            result = baselines.feature_wise(program, jobs=jobs)
        elif name == "pw":
            result = baselines.pair_wise(program, jobs=jobs)
        elif name == "splat":
            result = baselines.splat(program, lazy=False)
        else:
            result = baselines.splat(program, lazy=True)
        predictions = {c: result.predict(c) for c in truth}
        rows.append(
            ApproachReport(
                name=name,
                runs=result.runs,
                mape_percent=mape(predictions, truth),
                model=result.model.render() if result.model else None,
            )
        )
    return Comparison(
        program=program.source_name,
        options=len(program.options),
        total_configurations=1 << len(program.options),
        rows=rows,
    )


# -- ground-truth cache ----------------------------------------------------------


def source_digest(source: str) -> str:
    return hashlib.sha256(source.encode()).hexdigest()


def cache_path(cache_dir: str | Path, digest: str) -> Path:
    return Path(cache_dir) / f"{digest}.gt.json"


def _config_key(config: Config) -> str:
    return ",".join(sorted(config))


def _parse_key(key: str) -> Config:
    return frozenset(k for k in key.split(",") if k)


def save_ground_truth(path: Path, digest: str, times: Mapping[Config, Fraction]) -> None:
    payload = {
        "source_sha256": digest,
        "times_ms": {_config_key(c): str(t) for c, t in times.items()},
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def load_ground_truth(path: Path, digest: str | None = None) -> dict[Config, Fraction]:
    payload = json.loads(path.read_text())
    if digest is not None and payload.get("source_sha256") != digest:
        raise ValueError(f"{path} was measured from a different source")
    return {_parse_key(k): Fraction(v) for k, v in payload["times_ms"].items()}


def ground_truth(
    program: Program,
    source: str,
    *,
    cache_dir: str | Path | None = None,
    jobs: int = 1,
) -> tuple[dict[Config, Fraction], Path | None, bool]:
    """Exhaustive end-to-end times, reusing a cache entry when one matches.

    Returns the table, the cache file (if caching is on) and whether it was
    a cache hit.
    """
    digest = source_digest(source)
    path = cache_path(cache_dir, digest) if cache_dir is not None else None
    if path is not None and path.exists():
        return load_ground_truth(path, digest), path, True
    times = baselines.exhaustive_times(program, jobs=jobs)
    if path is not None:
        save_ground_truth(path, digest, times)
    return times, path, False
