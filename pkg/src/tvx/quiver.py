"""Bipartite (optionally levelled) quivers, dimension vectors and slope stability.

Arrows always point from sources J to sinks I.  A dimension vector is a
pair of ordered partitions: ``p1`` holds the values at the sinks, ``p2`` the
values at the sources.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial, gcd
from typing import Iterator, Sequence


@dataclass(frozen=True)
class DimVector:
    p1: tuple[int, ...]
    p2: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "p1", tuple(int(x) for x in self.p1))
        object.__setattr__(self, "p2", tuple(int(x) for x in self.p2))
        if any(x < 0 for x in self.p1 + self.p2):
            raise ValueError("dimension vector entries must be nonnegative")

    @property
    def entries(self) -> tuple[int, ...]:
        return self.p1 + self.p2

    @property
    def kronecker_type(self) -> tuple[int, int]:
        return sum(self.p1), sum(self.p2)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __add__(self, other: "DimVector") -> "DimVector":
        return DimVector(
            tuple(a + b for a, b in zip(self.p1, other.p1)),
            tuple(a + b for a, b in zip(self.p2, other.p2)),
        )

    def __sub__(self, other: "DimVector") -> "DimVector":
        return DimVector(
            tuple(a - b for a, b in zip(self.p1, other.p1)),
            tuple(a - b for a, b in zip(self.p2, other.p2)),
        )

    def __le__(self, other: "DimVector") -> bool:
        return all(a <= b for a, b in zip(self.entries, other.entries))

    def to_json(self) -> dict:
        return {"p1": list(self.p1), "p2": list(self.p2)}

    @classmethod
    def from_json(cls, doc: dict) -> "DimVector":
        return cls(tuple(doc["p1"]), tuple(doc["p2"]))

    def __str__(self):
        return f"({'+'.join(map(str, self.p1))},{'+'.join(map(str, self.p2))})"


@dataclass(frozen=True)
class BipartiteQuiver:
    """Sinks I (levels ``sink_levels``), sources J, ``mult[i][j]`` arrows j -> i."""

    sink_levels: tuple[int, ...]
    source_levels: tuple[int, ...]
    mult: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.mult) != self.l1 or any(len(row) != self.l2 for row in self.mult):
            raise ValueError("arrow multiplicity matrix has the wrong shape")

    @property
    def l1(self) -> int:
        return len(self.sink_levels)

    @property
    def l2(self) -> int:
        return len(self.source_levels)

    @property
    def levels(self) -> tuple[int, ...]:
        return self.sink_levels + self.source_levels

    @classmethod
    def complete(cls, l1: int, l2: int) -> "BipartiteQuiver":
        """K(l1, l2): one arrow from every source to every sink, all levels 1."""
        return cls((1,) * l1, (1,) * l2, tuple((1,) * l2 for _ in range(l1)))

    @classmethod
    def kronecker(cls, m: int) -> "BipartiteQuiver":
        """The m-Kronecker quiver K(m): one source, one sink, m arrows."""
        return cls((1,), (1,), ((m,),))

    @classmethod
    def levelled(cls, sink_levels: Sequence[int], source_levels: Sequence[int]) -> "BipartiteQuiver":
        """rs arrows from each level-s source to each level-r sink."""
        return cls(
            tuple(sink_levels),
            tuple(source_levels),
            tuple(tuple(r * s for s in source_levels) for r in sink_levels),
        )

    def check(self, d: DimVector) -> None:
        if len(d.p1) != self.l1 or len(d.p2) != self.l2:
            raise ValueError(f"dimension vector {d} does not fit a quiver with ({self.l1},{self.l2}) vertices")

    def to_json(self) -> dict:
        return {
            "l1": self.l1,
            "l2": self.l2,
            "levels": {"sinks": list(self.sink_levels), "sources": list(self.source_levels)},
            "mult": [list(row) for row in self.mult],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "BipartiteQuiver":
        levels = doc.get("levels") or {}
        l1, l2 = int(doc["l1"]), int(doc["l2"])
        sinks = tuple(levels.get("sinks", [1] * l1))
        sources = tuple(levels.get("sources", [1] * l2))
        mult = doc.get("mult") or [[1] * l2 for _ in range(l1)]
        return cls(sinks, sources, tuple(tuple(row) for row in mult))


def euler_form(Q: BipartiteQuiver, d: DimVector, e: DimVector) -> int:
    """<d, e> = sum_v d_v e_v - sum_{arrows j->i} d_j e_i."""
    Q.check(d)
    Q.check(e)
    diag = sum(a * b for a, b in zip(d.entries, e.entries))
    cross = 0
    for i, row in enumerate(Q.mult):
        ei = e.p1[i]
        if ei:
            cross += ei * sum(m * dj for m, dj in zip(row, d.p2))
    return diag - cross


def antisym_form(Q: BipartiteQuiver, d: DimVector, e: DimVector) -> int:
    return euler_form(Q, d, e) - euler_form(Q, e, d)


@dataclass(frozen=True)
class StabilitySpec:
    """Slope mu(d) = theta(d) / kappa(d), values listed sinks first, then sources."""

    theta: tuple[int, ...]
    kappa: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.kappa:
            object.__setattr__(self, "kappa", (1,) * len(self.theta))
        if len(self.kappa) != len(self.theta):
            raise ValueError("theta and kappa must have the same length")
        if any(k <= 0 for k in self.kappa):
            raise ValueError("kappa must be positive on every vertex")

    @classmethod
    def default(cls, Q: BipartiteQuiver) -> "StabilitySpec":
        """Theta = 1 on sources, 0 on sinks; kappa = dim."""
        return cls((0,) * Q.l1 + (1,) * Q.l2, (1,) * (Q.l1 + Q.l2))

    @classmethod
    def levelled_default(cls, Q: BipartiteQuiver) -> "StabilitySpec":
        """Theta = level on sources, 0 on sinks; kappa = level everywhere."""
        return cls((0,) * Q.l1 + Q.source_levels, Q.sink_levels + Q.source_levels)


def slope(spec: StabilitySpec, d: DimVector) -> Fraction:
    ent = d.entries
    if len(ent) != len(spec.theta):
        raise ValueError("stability and dimension vector have different vertex counts")
    den = sum(k * x for k, x in zip(spec.kappa, ent))
    if den == 0:
        raise ValueError("slope of the zero dimension vector is undefined")
    return Fraction(sum(t * x for t, x in zip(spec.theta, ent)), den)


def subvectors(d: DimVector, *, proper: bool = True) -> Iterator[DimVector]:
    """All nonzero e <= d (excluding d itself when ``proper``)."""
    l1 = len(d.p1)
    for ent in product(*(range(x + 1) for x in d.entries)):
        if not any(ent):
            continue
        e = DimVector(ent[:l1], ent[l1:])
        if proper and e == d:
            continue
        yield e


def is_theta_coprime(spec: StabilitySpec, d: DimVector) -> bool:
    mu = slope(spec, d)
    return all(slope(spec, e) != mu for e in subvectors(d))


def compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    """Ordered partitions of ``total`` into ``parts`` nonnegative parts, descending lex."""
    if parts == 0:
        return [()] if total == 0 else []
    if parts == 1:
        return [(total,)]
    out = []
    for first in range(total, -1, -1):
        out.extend((first,) + rest for rest in compositions(total - first, parts - 1))
    return out


def enum_dimvecs(l1: int, l2: int, k: int, a: int, b: int) -> list[DimVector]:
    """All d with |P1| = ka, |P2| = kb, in descending lexicographic order."""
    return [DimVector(p, r) for p in compositions(k * a, l1) for r in compositions(k * b, l2)]


def rearrangement_count(P: Sequence[int]) -> int:
    """Number of distinct orderings of the parts of P."""
    counts: dict[int, int] = {}
    for x in P:
        counts[x] = counts.get(x, 0) + 1
    out = factorial(len(P))
    for c in counts.values():
        out //= factorial(c)
    return out


def is_indivisible(d: DimVector) -> bool:
    g = 0
    for x in d.entries:
        g = gcd(g, x)
    return g == 1


def dimvec_to_exponents(d: DimVector) -> tuple[int, ...]:
    return d.p1 + d.p2


def exponents_to_dimvec(exps: Sequence[int], l1: int) -> DimVector:
    return DimVector(tuple(exps[:l1]), tuple(exps[l1:]))
