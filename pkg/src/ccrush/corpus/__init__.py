"""Bundled example programs."""

from __future__ import annotations

from importlib import resources

from ..lang import Program, parse


def names() -> list[str]:
    out = []
    for entry in resources.files(__package__).iterdir():
        if entry.name.endswith(".ccl"):
            out.append(entry.name)
    return sorted(out)


def source(name: str) -> str:
    if not name.endswith(".ccl"):
        name += ".ccl"
    return resources.files(__package__).joinpath(name).read_text()


def load_program(name: str) -> Program:
    if not name.endswith(".ccl"):
        name += ".ccl"
    return parse(source(name), source_name=name)
