"""Gromov-Witten invariants read off wall functions, and correspondence checks.

log f_{(a,b)} = sum_k sum_{P1,P2} k N_{(a,b)}[(P1,P2)] s^P1 t^P2 (x^a y^b)^k,
so the invariants are log coefficients divided by the level.  The powers
f^b and f^a are the Euler characteristic series of the source-framed and
sink-framed smooth models and must have integer coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .funceq import _plain_shape, extract_chi
from .hn import euler_stable
from .numerics import Rational, as_rational
from .quiver import BipartiteQuiver, DimVector, StabilitySpec, enum_dimvecs, exponents_to_dimvec
from .series import TruncatedSeries
from .wallcross import InitialData, factorize


class CorrespondenceViolation(ArithmeticError):
    pass


@dataclass
class GWTable:
    a: int
    b: int
    refined: dict[DimVector, Rational] = field(default_factory=dict)
    levels: dict[DimVector, int] = field(default_factory=dict)
    max_level: int = 0

    def aggregated(self, k: int) -> Rational:
        return as_rational(sum(Fraction(v) for d, v in self.refined.items() if self.levels[d] == k))

    def to_json(self) -> dict:
        rows = sorted(self.refined, key=lambda d: (self.levels[d], d.p1, d.p2))
        return {
            "a": self.a,
            "b": self.b,
            "refined": [
                {"p1": list(d.p1), "p2": list(d.p2), "k": self.levels[d], "N": str(Fraction(self.refined[d]))}
                for d in rows
            ],
            "aggregated": [{"k": k, "N": str(Fraction(self.aggregated(k)))} for k in range(1, self.max_level + 1)],
        }


def gw_from_wall(f: TruncatedSeries, a: int, b: int) -> GWTable:
    """N[(P1,P2)] = (coefficient of s^P1 t^P2 at level k in log f) / k."""
    l1, _ = _plain_shape(f.ctx)
    if gcd(a, b) != 1:
        raise ValueError("(a, b) must be coprime")
    L = f.log()
    K = f.exact_levels(a, b)
    out = GWTable(a, b, max_level=K)
    for _, key, c in L.packed_items():
        k = f.level_of(key, a, b)
        if k > K:
            continue
        d = exponents_to_dimvec(f.ctx.unpack(key), l1)
        out.refined[d] = as_rational(Fraction(c) / k)
        out.levels[d] = k
    return out


def smooth_model_chi(f: TruncatedSeries, a: int, b: int, spec: str) -> dict[DimVector, int]:
    """Coefficients of f^b (spec "b", source framing) or f^a (spec "f", sink framing)."""
    l1, _ = _plain_shape(f.ctx)
    if spec not in ("b", "f"):
        raise ValueError("framing must be 'b' or 'f'")
    g = f ** (b if spec == "b" else a)
    out = {}
    for exps, c in g.terms():
        if Fraction(c).denominator != 1:
            raise CorrespondenceViolation(f"non-integral smooth-model coefficient {c} at {exps}")
        if any(exps):
            out[exponents_to_dimvec(exps, l1)] = int(c)
    return out


@dataclass
class CorrespondenceReport:
    l1: int
    l2: int
    a: int
    b: int
    rows: list[tuple[DimVector, Rational, int]]

    @property
    def passed(self) -> bool:
        return all(n == chi for _, n, chi in self.rows)

    @property
    def total_N(self) -> Rational:
        return as_rational(sum(Fraction(n) for _, n, _ in self.rows))

    @property
    def total_chi(self) -> int:
        return sum(c for _, _, c in self.rows)

    def to_json(self) -> dict:
        return {
            "l1": self.l1,
            "l2": self.l2,
            "a": self.a,
            "b": self.b,
            "rows": [{"p1": list(d.p1), "p2": list(d.p2), "N": str(Fraction(n)), "chi": c} for d, n, c in self.rows],
            "total_N": str(Fraction(self.total_N)),
            "total_chi": self.total_chi,
            "passed": self.passed,
        }


def coprime_correspondence_check(
    l1: int, l2: int, a: int, b: int, order: int | None = None, wall: TruncatedSeries | None = None
) -> CorrespondenceReport:
    """Compare level-1 invariants from the wall with HN Euler characteristics."""
    if gcd(a, b) != 1:
        raise ValueError("(a, b) must be coprime")
    order = a + b if order is None else order
    if wall is None:
        wall = factorize(InitialData.plain(l1, l2), order).wall_function(a, b)
    table = gw_from_wall(wall, a, b)
    Q = BipartiteQuiver.complete(l1, l2)
    spec = StabilitySpec.default(Q)
    rows = []
    for d in enum_dimvecs(l1, l2, 1, a, b):
        rows.append((d, table.refined.get(d, 0), euler_stable(Q, spec, d)))
    return CorrespondenceReport(l1, l2, a, b, rows)


def kronecker_euler(m: int, p: int, q: int) -> int:
    """chi of the stable moduli of K(m) with p at the sink and q at the source (coprime only)."""
    K = BipartiteQuiver.kronecker(m)
    return euler_stable(K, StabilitySpec.default(K), DimVector((p,), (q,)))


def balanced_divisibility_check(
    m: int, a: int, b: int, k: int = 1, wall: TruncatedSeries | None = None
) -> tuple[bool, int, int]:
    """(ok, sum of chi over type (ka, kb) on K(m,m), m * chi of K(m) at (ka, kb)).

    The K(m,m) side comes from HN, or from extraction when a wall is given;
    the Kronecker side needs (ka, kb) coprime, so only k = 1 is supported.
    """
    if gcd(a, b) != 1:
        raise ValueError("(a, b) must be coprime")
    if k != 1:
        raise NotImplementedError("the Kronecker side is only available for coprime (ka, kb)")
    Q = BipartiteQuiver.complete(m, m)
    spec = StabilitySpec.default(Q)
    if wall is None:
        total = sum(euler_stable(Q, spec, d) for d in enum_dimvecs(m, m, k, a, b))
    else:
        total = extract_chi(wall, a, b, k * (a + b)).aggregated(a, b, k)
    rhs = m * kronecker_euler(m, k * a, k * b)
    return total == rhs, total, rhs
