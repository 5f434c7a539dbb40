"""The tropical vertex group: wall automorphisms and ordered factorizations.

An automorphism theta of the torus algebra is recorded by its action on the
two generators, theta(x) = x*U and theta(y) = y*V, where U and V are series
in the s/t variables.  A monomial with bidegree (p, q) is sent by
T_{(a,b),f} to itself times f**(a*q - b*p).

Composition is function composition, (T o S)(g) = T(S(g)); an ordered
product is listed outermost first, so in the factorization the wall with
the largest slope b/a is applied last.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Iterable, Sequence

from .numerics import as_rational, binom_general
from .series import (
    ContextMismatchError,
    SeriesContext,
    TruncatedSeries,
    _clean,
    _mul_into,
    bipartite_context,
    levelled_context,
)

log = logging.getLogger(__name__)


class ScatteringConsistencyError(RuntimeError):
    """An order-n discrepancy violated the -b : a ratio of a single wall."""


class WallAutomorphism:
    """T_{(a,b),f}: x -> x f^{-b}, y -> y f^{a}."""

    __slots__ = ("a", "b", "f", "_hpow")

    def __init__(self, a: int, b: int, f: TruncatedSeries):
        if a < 0 or b < 0 or (a, b) == (0, 0) or gcd(a, b) != 1:
            raise ValueError(f"direction ({a},{b}) is not primitive in N^2")
        if f.constant_term != 1:
            raise ValueError("wall function must have constant term 1")
        self.a, self.b, self.f = a, b, f
        self._hpow: dict[int, list[TruncatedSeries]] = {}

    @property
    def direction(self) -> tuple[int, int]:
        return self.a, self.b

    def __repr__(self):
        return f"WallAutomorphism(({self.a},{self.b}), {self.f!r})"

    def inverse(self) -> "WallAutomorphism":
        return WallAutomorphism(self.a, self.b, self.f.inverse())

    def truncate(self, order: int) -> "WallAutomorphism":
        if order >= self.f.order:
            return self
        return WallAutomorphism(self.a, self.b, self.f.truncate(order))

    def _h_powers(self, order: int) -> list[TruncatedSeries]:
        cached = self._hpow.get(order)
        if cached is not None:
            return cached
        h = (self.f - 1).truncate(order)
        powers: list[TruncatedSeries] = []
        v = h.valuation()
        if v is not None:
            p = h
            while p.valuation() is not None:
                powers.append(p)
                p = p * h
        self._hpow[order] = powers
        return powers

    def apply(self, g: TruncatedSeries) -> TruncatedSeries:
        """Image of g: every monomial of bidegree (p,q) is multiplied by f^(aq - bp).

        Uses f^j = sum_i binom(j, i) h^i with h = f - 1, so
        T(g) = sum_i h^i * g_i where g_i carries the weights binom(j, i).
        """
        if g.ctx != self.f.ctx:
            raise ContextMismatchError("wall and series live in different contexts")
        n = min(g.order, self.f.order)
        powers = self._h_powers(n)
        out = [dict(g.homogeneous(d)) for d in range(n + 1)]
        if not powers:
            return TruncatedSeries(g.ctx, n, out)
        a, b = self.a, self.b
        bideg = g.ctx.bidegree
        jcache: dict[int, int] = {}
        for i, hp in enumerate(powers, start=1):
            v = hp.valuation()
            binoms: dict[int, int] = {}
            for d in range(n - v + 1):
                src = g.homogeneous(d)
                if not src:
                    continue
                gi = {}
                for k, c in src.items():
                    j = jcache.get(k)
                    if j is None:
                        p, q = bideg(k)
                        j = jcache[k] = a * q - b * p
                    w = binoms.get(j)
                    if w is None:
                        w = binoms[j] = binom_general(j, i)
                    if w:
                        gi[k] = c * w
                if not gi:
                    continue
                for dh in range(v, n - d + 1):
                    hb = hp.homogeneous(dh)
                    if hb:
                        _mul_into(out[d + dh], gi, hb)
        return TruncatedSeries(g.ctx, n, [_clean(b_) for b_ in out])


def action(walls: Sequence[WallAutomorphism], ctx: SeriesContext, order: int):
    """(U, V) with P(x) = xU, P(y) = yV for P = walls[0] o walls[1] o ...

    P_k(x) = W_k(x * U_{k+1}) = x f_k^{-b_k} W_k(U_{k+1}), built from the
    innermost wall outwards.
    """
    U = TruncatedSeries.one(ctx, order)
    V = TruncatedSeries.one(ctx, order)
    for w in reversed(walls):
        w = w.truncate(order)
        U, V = w.apply(U), w.apply(V)
        if w.b:
            U = U * (w.f ** (-w.b))
        if w.a:
            V = V * (w.f ** w.a)
    return U, V


def _slope_cmp(d1: tuple[int, int], d2: tuple[int, int]) -> int:
    # decreasing b/a; (0,1) has slope +inf
    lhs, rhs = d1[1] * d2[0], d2[1] * d1[0]
    return -1 if lhs > rhs else (1 if lhs < rhs else 0)


def sort_by_decreasing_slope(directions: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    return sorted(directions, key=cmp_to_key(_slope_cmp))


@dataclass(frozen=True)
class Factor:
    """(1 + v)^exponent, with v the context variable ``variable`` (weight r)."""

    variable: str
    weight: int = 1
    exponent: int = 1


@dataclass(frozen=True)
class InitialData:
    x_factors: tuple[Factor, ...]
    y_factors: tuple[Factor, ...]

    @classmethod
    def plain(cls, l1: int, l2: int) -> "InitialData":
        return cls(
            tuple(Factor(f"s{k}") for k in range(1, l1 + 1)),
            tuple(Factor(f"t{l}") for l in range(1, l2 + 1)),
        )

    @classmethod
    def levelled(cls, levels_x: Sequence[int], levels_y: Sequence[int]) -> "InitialData":
        """One factor (1 + s^r x^r)^r per sink of level r (likewise for sources)."""
        ctx = levelled_context(levels_x, levels_y)
        xs = [v for v in ctx.variables if v.axis == "X"]
        ys = [v for v in ctx.variables if v.axis == "Y"]
        return cls(
            tuple(Factor(v.name, v.weight, v.weight) for v in xs),
            tuple(Factor(v.name, v.weight, v.weight) for v in ys),
        )

    @classmethod
    def from_level_counts(cls, counts_x: Sequence[int], counts_y: Sequence[int]) -> "InitialData":
        """``counts_x[r-1]`` sinks of level r (the tuple l1* of the levelled quiver)."""
        lx = [r for r, c in enumerate(counts_x, start=1) for _ in range(c)]
        ly = [s for s, c in enumerate(counts_y, start=1) for _ in range(c)]
        return cls.levelled(lx, ly)

    def is_plain(self) -> bool:
        return all(f.weight == 1 and f.exponent == 1 for f in self.x_factors + self.y_factors)

    def context(self) -> SeriesContext:
        if all(f.weight == 1 for f in self.x_factors + self.y_factors) and all(
            f.variable == f"s{k}" for k, f in enumerate(self.x_factors, 1)
        ) and all(f.variable == f"t{l}" for l, f in enumerate(self.y_factors, 1)):
            return bipartite_context(len(self.x_factors), len(self.y_factors))
        return levelled_context([f.weight for f in self.x_factors], [f.weight for f in self.y_factors])

    def axis_functions(self, order: int) -> tuple[TruncatedSeries, TruncatedSeries]:
        ctx = self.context()
        out = []
        for factors in (self.x_factors, self.y_factors):
            acc = TruncatedSeries.one(ctx, order)
            for fac in factors:
                v = ctx.variables[ctx.index(fac.variable)]
                if v.weight != fac.weight:
                    raise ValueError(f"factor weight {fac.weight} != variable weight {v.weight}")
                acc = acc * ((TruncatedSeries.variable(ctx, order, fac.variable) + 1) ** fac.exponent)
            out.append(acc)
        return out[0], out[1]

    def commutator_walls(self, order: int) -> list[WallAutomorphism]:
        """The left-hand side T_{(1,0),F} o T_{(0,1),G}, outermost first."""
        F, G = self.axis_functions(order)
        return [WallAutomorphism(1, 0, F), WallAutomorphism(0, 1, G)]


@dataclass
class Scattering:
    """Wall functions f_{(a,b)} of the ordered factorization, exact mod m^(N+1)."""

    order: int
    ctx: SeriesContext
    walls: dict[tuple[int, int], WallAutomorphism]

    def directions(self) -> list[tuple[int, int]]:
        return sort_by_decreasing_slope(self.walls)

    def ordered(self) -> list[WallAutomorphism]:
        return [self.walls[d] for d in self.directions()]

    def wall_function(self, a: int, b: int) -> TruncatedSeries:
        w = self.walls.get((a, b))
        return w.f if w is not None else TruncatedSeries.one(self.ctx, self.order)

    def action(self, order: int | None = None):
        return action(self.ordered(), self.ctx, self.order if order is None else order)

    def to_json(self) -> list[dict]:
        return [{"a": w.a, "b": w.b, "f": w.f.to_json()} for w in self.ordered()]

    @classmethod
    def from_json(cls, doc: list[dict]) -> "Scattering":
        walls = {}
        ctx = None
        order = 0
        for item in doc:
            f = TruncatedSeries.from_json(item["f"], ctx)
            ctx, order = f.ctx, f.order
            walls[(int(item["a"]), int(item["b"]))] = WallAutomorphism(int(item["a"]), int(item["b"]), f)
        if ctx is None:
            raise ValueError("cannot infer the context of an empty scattering")
        return cls(order, ctx, walls)


def _direction(p: int, q: int) -> tuple[int, int]:
    g = gcd(p, q)
    return p // g, q // g


def factorize(init: InitialData, order: int) -> Scattering:
    """Unique ordered factorization of T_{(1,0),F} o T_{(0,1),G}, order by order.

    At step n the product of the walls found so far agrees with the
    commutator modulo m^n; the order-n discrepancy of P^{-1} o LHS on x and
    y is, per monomial of bidegree k(a,b), (-b c, a c) and c is multiplied
    into f_{(a,b)}.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    ctx = init.context()
    U_L, V_L = action(init.commutator_walls(order), ctx, order)
    fs: dict[tuple[int, int], TruncatedSeries] = {}
    for n in range(1, order + 1):
        walls = [
            WallAutomorphism(*d, fs[d].truncate(n)) for d in sort_by_decreasing_slope(fs)
        ]
        U_P, V_P = action(walls, ctx, n)
        for d in range(n):
            if U_P.homogeneous(d) != U_L.homogeneous(d) or V_P.homogeneous(d) != V_L.homogeneous(d):
                raise ScatteringConsistencyError(f"lower order {d} disagrees at step {n}")
        dx = dict(U_L.homogeneous(n))
        for k, c in U_P.homogeneous(n).items():
            dx[k] = dx.get(k, 0) - c
        dy = dict(V_L.homogeneous(n))
        for k, c in V_P.homogeneous(n).items():
            dy[k] = dy.get(k, 0) - c
        for key in sorted(set(dx) | set(dy)):
            cx, cy = dx.get(key, 0), dy.get(key, 0)
            if not cx and not cy:
                continue
            a, b = _direction(*ctx.bidegree(key))
            if a * cx + b * cy != 0:
                raise ScatteringConsistencyError(
                    f"discrepancy ({cx}, {cy}) at {ctx.unpack(key)} is not of the form (-{b}c, {a}c)"
                )
            c = as_rational(Fraction(cy) / a) if a else as_rational(Fraction(-cx) / b)
            f = fs.get((a, b))
            if f is None:
                f = TruncatedSeries.one(ctx, order)
            fs[(a, b)] = f + f.mul_monomial(key, n, c)
        log.debug("order %d: %d walls", n, len(fs))
    return Scattering(order, ctx, {d: WallAutomorphism(*d, f) for d, f in fs.items()})


def factorize_levelled(init: InitialData, order: int) -> Scattering:
    """Same contract as :func:`factorize`; each factor must carry exponent = weight."""
    for fac in init.x_factors + init.y_factors:
        if fac.exponent != fac.weight:
            raise ValueError(f"levelled factor {fac} must have exponent equal to its weight")
    return factorize(init, order)


def compose_and_verify(S: Scattering, init: InitialData) -> bool:
    """True iff the ordered product reproduces the commutator mod m^(N+1)."""
    ctx = init.context()
    if not init.x_factors and not init.y_factors:
        U, V = S.action() if S.walls else (TruncatedSeries.one(ctx, S.order),) * 2
        return U == TruncatedSeries.one(ctx, S.order) and V == TruncatedSeries.one(ctx, S.order)
    if S.ctx != ctx:
        return False
    U_L, V_L = action(init.commutator_walls(S.order), ctx, S.order)
    U_P, V_P = S.action()
    return U_L == U_P and V_L == V_P


def apply(T: WallAutomorphism, g: TruncatedSeries) -> TruncatedSeries:
    return T.apply(g)
