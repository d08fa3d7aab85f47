"""Search and enumeration budgets.

Defaults can be overridden with the ``FRUGALITY_CAPS`` environment variable,
e.g. ``FRUGALITY_CAPS="enumeration=20000,covers=5000,bisection=64"``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Caps:
    enumeration: int = 10**6   # feasible sets materialized per family
    covers: int = 200_000      # LP subproblems in the min-bound search
    bisection: int = 128       # probes per threshold search

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"cap {f.name} must be positive")


def parse_caps(text: str, base: Caps | None = None) -> Caps:
    base = base or Caps()
    if not text.strip():
        return base
    updates = {}
    names = {f.name for f in fields(Caps)}
    for part in text.split(","):
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in names:
            raise ValueError(f"unknown cap {key!r}; expected one of {sorted(names)}")
        updates[key] = int(value)
    return replace(base, **updates)


def default_caps() -> Caps:
    return parse_caps(os.environ.get("FRUGALITY_CAPS", ""))
