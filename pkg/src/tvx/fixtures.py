"""Golden data shipped with the package: factored wall functions and reference values."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .numerics import rational_from_str
from .series import TruncatedSeries, bipartite_context

WALL_FIXTURES = ("pentagon", "k12", "k13", "k22_central", "k14_slope12")


@lru_cache(maxsize=None)
def load(name: str) -> dict:
    path = resources.files("tvx") / "data" / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"unknown fixture {name!r}")
    return json.loads(path.read_text())


def expand_wall(fixture: dict, wall: dict, order: int) -> TruncatedSeries:
    """Multiply out prod (1 + c m)^power to the given order."""
    ctx = bipartite_context(fixture["l1"], fixture["l2"])
    acc = TruncatedSeries.one(ctx, order)
    for fac in wall["factors"]:
        m = TruncatedSeries.monomial(ctx, order, fac["exponents"], rational_from_str(fac["coeff"]))
        acc = acc * ((m + 1) ** int(fac["power"]))
    return acc


def expanded_walls(name: str, order: int) -> dict[tuple[int, int], TruncatedSeries]:
    fx = load(name)
    return {(w["a"], w["b"]): expand_wall(fx, w, order) for w in fx["walls"]}


def reference_values(key: str | None = None) -> list[dict]:
    vals = load("values")["values"]
    return [v for v in vals if key is None or v["key"] == key]
