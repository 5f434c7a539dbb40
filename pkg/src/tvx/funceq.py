"""Functional equations linking wall functions and Euler characteristics.

* :func:`solve_R_system` builds f_{(a,b)} from a table of Euler characteristics
  chi(P1, P2) through the system of equations for the series R^{P1,P2}.
* :func:`extract_chi` inverts it level by level.
* :func:`solve_specialized` solves the single equation obtained by setting
  every s_k and t_l to one variable.
* :func:`central_system` solves the algebraic system at slope (1, 1).
* closed forms, Moebius inversion and product factorization of specialized series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .numerics import Rational, as_rational, binom_general
from .quiver import (
    BipartiteQuiver,
    DimVector,
    dimvec_to_exponents,
    enum_dimvecs,
    euler_form,
    exponents_to_dimvec,
)
from .series import SeriesContext, TruncatedSeries, VariableSpec, bipartite_context

PROVENANCES = ("direct-HN", "extracted", "fixture")


class MissingChiError(KeyError):
    pass


class ExtractionError(ArithmeticError):
    """Non-integral candidate chi or a failed round trip."""


class UseLogRouteError(ValueError):
    """Closed form with a 1/E factor requested while E = 0."""


# -- chi tables -----------------------------------------------------------------


@dataclass
class ChiTable:
    """chi(P1, P2) for one complete bipartite quiver, with a provenance per entry."""

    l1: int
    l2: int
    values: dict[DimVector, int] = field(default_factory=dict)
    provenance: dict[DimVector, str] = field(default_factory=dict)

    @property
    def quiver(self) -> BipartiteQuiver:
        return BipartiteQuiver.complete(self.l1, self.l2)

    def set(self, d: DimVector, chi: int, provenance: str) -> None:
        if provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {provenance!r}")
        if len(d.p1) != self.l1 or len(d.p2) != self.l2:
            raise ValueError(f"{d} does not belong to K({self.l1},{self.l2})")
        self.values[d] = int(chi)
        self.provenance[d] = provenance

    def __contains__(self, d: DimVector) -> bool:
        return d in self.values

    def __getitem__(self, d: DimVector) -> int:
        try:
            return self.values[d]
        except KeyError:
            raise MissingChiError(f"no chi entry for {d}") from None

    def get(self, d: DimVector, default: int | None = None):
        return self.values.get(d, default)

    def level_entries(self, a: int, b: int, k: int) -> list[DimVector]:
        return [d for d in enum_dimvecs(self.l1, self.l2, k, a, b) if d in self.values]

    def aggregated(self, a: int, b: int, k: int) -> int:
        """chi_{(a,b)}(k): the sum over all pairs of Kronecker type (ka, kb)."""
        return sum(self[d] for d in enum_dimvecs(self.l1, self.l2, k, a, b))

    def restricted(self, a: int, b: int, max_level: int) -> "ChiTable":
        out = ChiTable(self.l1, self.l2)
        for k in range(1, max_level + 1):
            for d in enum_dimvecs(self.l1, self.l2, k, a, b):
                if d in self.values:
                    out.set(d, self.values[d], self.provenance[d])
        return out

    def is_symmetric(self) -> bool:
        for d, c in self.values.items():
            key = (tuple(sorted(d.p1)), tuple(sorted(d.p2)))
            for e, c2 in self.values.items():
                if (tuple(sorted(e.p1)), tuple(sorted(e.p2))) == key and c2 != c:
                    return False
        return True

    def to_json(self) -> list[dict]:
        rows = sorted(self.values, key=lambda d: (sum(d.p1) + sum(d.p2), d.p1, d.p2))
        return [
            {"p1": list(d.p1), "p2": list(d.p2), "chi": self.values[d], "provenance": self.provenance[d]}
            for d in rows
        ]

    @classmethod
    def from_json(cls, doc: list[dict], l1: int | None = None, l2: int | None = None) -> "ChiTable":
        if doc:
            l1 = len(doc[0]["p1"]) if l1 is None else l1
            l2 = len(doc[0]["p2"]) if l2 is None else l2
        if l1 is None or l2 is None:
            raise ValueError("cannot infer the quiver of an empty table")
        out = cls(l1, l2)
        for row in doc:
            out.set(DimVector(tuple(row["p1"]), tuple(row["p2"])), int(row["chi"]), row.get("provenance", "fixture"))
        return out


@dataclass
class RSystemSolution:
    order: int
    series: dict[DimVector, TruncatedSeries]


def _plain_shape(ctx: SeriesContext) -> tuple[int, int]:
    l1 = sum(1 for v in ctx.variables if v.axis == "X")
    l2 = ctx.nvars - l1
    if ctx != bipartite_context(l1, l2):
        raise ValueError("expected the plain bipartite context s1.., t1..")
    return l1, l2


def _first_diff_degree(f: TruncatedSeries, g: TruncatedSeries) -> int | None:
    for d in range(min(f.order, g.order) + 1):
        if f.homogeneous(d) != g.homogeneous(d):
            return d
    return None


def _unit(l1: int, l2: int, v: int) -> DimVector:
    ent = [0] * (l1 + l2)
    ent[v] = 1
    return exponents_to_dimvec(ent, l1)


def solve_R_system(
    chi: ChiTable, a: int, b: int, N: int, *, all_entries: bool = False
) -> tuple[RSystemSolution, TruncatedSeries]:
    """Fixed-point solution of R = (1 - s^P1 t^P2 (x^a y^b)^k prod R'^(-<d,d'> chi'))^-1.

    Returns the R series (for entries with nonzero chi, or for every entry
    when ``all_entries``) and f = prod R^(k chi) to total degree N.
    """
    l1, l2 = chi.l1, chi.l2
    Q = chi.quiver
    ctx = bipartite_context(l1, l2)
    step = a + b
    K = N // step
    entries: list[tuple[DimVector, int, int]] = []
    for k in range(1, K + 1):
        for d in enum_dimvecs(l1, l2, k, a, b):
            entries.append((d, k, chi[d]))
    active = [(d, k, c) for d, k, c in entries if c]
    targets = entries if all_entries else active
    one = TruncatedSeries.one(ctx, N)
    nv = l1 + l2
    units = [_unit(l1, l2, v) for v in range(nv)]
    # row[v] lists (<e_v, d'> chi(d'), d') for the active d'
    rows = [[(euler_form(Q, units[v], d) * c, d) for d, _, c in active] for v in range(nv)]
    rows = [[(w, d) for w, d in row if w] for row in rows]
    monos = {d: ctx.pack(dimvec_to_exponents(d)) for d, _, _ in targets}

    R = {d: one for d, _, _ in targets}
    stable_upto = -1
    for sweep in range(K + 2):
        logs = {d: R[d].log() for d, _, _ in active}
        E = []
        for v in range(nv):
            lam = TruncatedSeries.zero(ctx, N)
            for w, d in rows[v]:
                lam = lam + logs[d] * w
            E.append((-lam).exp())
        new = {}
        for d, k, _ in targets:
            T = one
            for v, x in enumerate(d.entries):
                if x:
                    T = T * (E[v] ** x)
            T = T.mul_monomial(monos[d], k * step)
            new[d] = (1 - T).inverse()
        diff = [x for x in (_first_diff_degree(R[d], new[d]) for d in R) if x is not None]
        R = new
        if not diff:
            break
        lowest = min(diff)
        if lowest <= stable_upto:
            raise ArithmeticError("R-system iteration made no progress")
        stable_upto = lowest
    else:
        raise ArithmeticError("R-system iteration did not stabilize")
    logf = TruncatedSeries.zero(ctx, N)
    for d, k, c in active:
        logf = logf + R[d].log() * (k * c)
    return RSystemSolution(N, R), logf.exp()


def extract_chi(f: TruncatedSeries, a: int, b: int, N: int | None = None) -> ChiTable:
    """Recover chi(P1, P2) level by level from a plain wall function f_{(a,b)}."""
    l1, l2 = _plain_shape(f.ctx)
    if f.constant_term != 1:
        raise ValueError("wall function must have constant term 1")
    bideg = f.ctx.bidegree
    for _, key, _ in f.packed_items():
        p, q = bideg(key)
        if key and p * b != q * a:
            raise ValueError("series has monomials off the ray through (a, b)")
    N = f.order if N is None else min(N, f.order)
    step = a + b
    K = N // step
    table = ChiTable(l1, l2)
    for k in range(1, K + 1):
        level = enum_dimvecs(l1, l2, k, a, b)
        for d in level:
            table.set(d, 0, "extracted")
        _, model = solve_R_system(table, a, b, k * step)
        for d in level:
            exps = dimvec_to_exponents(d)
            diff = Fraction(f.coeff(exps)) - Fraction(model.coeff(exps))
            c = diff / k
            if c.denominator != 1:
                raise ExtractionError(f"non-integral extraction at {d}: {c}")
            table.set(d, int(c), "extracted")
    _, g = solve_R_system(table, a, b, K * step)
    if g != f.truncate(K * step):
        raise ExtractionError("round trip through the R-system does not reproduce f")
    return table


# -- specialization -------------------------------------------------------------

UNIVARIATE = SeriesContext([VariableSpec("u", "X", 1)])


def univariate(coeffs: Sequence[Rational], order: int | None = None) -> TruncatedSeries:
    order = len(coeffs) - 1 if order is None else order
    return TruncatedSeries.from_terms(UNIVARIATE, order, [((i,), c) for i, c in enumerate(coeffs)])


def coefficients(f: TruncatedSeries) -> list[Rational]:
    return [f.homogeneous(i).get(f.ctx.pack((i,)), 0) for i in range(f.order + 1)]


def E_value(l1: int, l2: int, a: int, b: int) -> Rational:
    return as_rational(Fraction(l1 * l2 * a * b - l2 * a * a - l1 * b * b, l1 * l2))


@dataclass
class SpecializedContext:
    a: int
    b: int
    E: Rational
    f: list[Rational]
    chi: list[int]


def solve_specialized(chi_k: Sequence[int], a: int, b: int, E: Rational, K_max: int) -> list[Rational]:
    """Coefficients f_0..f_K of the solution of f = prod_k (1 - (u f^E)^k)^(-k chi(k)).

    ``chi_k[k-1]`` is chi(k); u stands for (tx)^a (ty)^b.
    """
    u = univariate([0, 1], K_max)
    one = TruncatedSeries.one(UNIVARIATE, K_max)
    f = one
    stable_upto = -1
    for _ in range(K_max + 2):
        g = u * (f.pow_rational(E) if E else one)
        acc = TruncatedSeries.zero(UNIVARIATE, K_max)
        gk = one
        for k in range(1, K_max + 1):
            gk = gk * g
            c = chi_k[k - 1] if k - 1 < len(chi_k) else 0
            if c:
                acc = acc + (1 - gk).log() * (-k * c)
        new = acc.exp()
        lowest = _first_diff_degree(f, new)
        f = new
        if lowest is None:
            break
        if lowest <= stable_upto:
            raise ArithmeticError("specialized iteration made no progress")
        stable_upto = lowest
    else:
        raise ArithmeticError("specialized iteration did not stabilize")
    return coefficients(f)


def N_from_log(f_coeffs: Sequence[Rational]) -> list[Rational]:
    """N[k] = [u^k] log f / k for k = 1..K (the route that also covers E = 0)."""
    L = coefficients(univariate(f_coeffs).log())
    return [as_rational(Fraction(L[k]) / k) for k in range(1, len(L))]


def central_system(l1: int, l2: int, N: int) -> tuple[dict[tuple[int, int], TruncatedSeries], TruncatedSeries]:
    """R^{k,l} = 1 + s_k t_l x y prod_{k' != k, l' != l} R^{k',l'}, and f_{(1,1)} = prod R^{k,l}."""
    ctx = bipartite_context(l1, l2)
    one = TruncatedSeries.one(ctx, N)
    monos = {}
    for k in range(l1):
        for l in range(l2):
            e = [0] * (l1 + l2)
            e[k] = e[l1 + l] = 1
            monos[(k, l)] = ctx.pack(e)
    R = {kl: one for kl in monos}
    for _ in range(N + 2):
        new = {}
        for (k, l), key in monos.items():
            P = one
            for (k2, l2_), r in R.items():
                if k2 != k and l2_ != l:
                    P = P * r
            new[(k, l)] = one + P.mul_monomial(key, 2)
        done = all(new[kl] == R[kl] for kl in R)
        R = new
        if done:
            break
    else:
        raise ArithmeticError("central system did not stabilize")
    f = one
    for r in R.values():
        f = f * r
    return {(k + 1, l + 1): r for (k, l), r in R.items()}, f


# -- closed forms ---------------------------------------------------------------


def _ordered_partitions_by_weight(k: int) -> Iterable[tuple[int, ...]]:
    """Tuples (r_1..r_k) of nonnegative ints with sum_i i r_i = k."""

    def rec(i: int, rem: int):
        if i > k:
            if rem == 0:
                yield ()
            return
        for r in range(rem // i + 1):
            for tail in rec(i + 1, rem - i * r):
                yield (r,) + tail

    yield from rec(1, k)


def closed_form_N(kind: str, **params) -> Rational:
    """Closed forms for aggregated invariants.

    kind="central": l1, l2, k.  kind="dm1d": l1, l2, d.
    kind="sgw": l1, l2, a, b, chi (list, chi[i-1] = chi(i)), k.
    """
    if kind == "central":
        l1, l2, k = params["l1"], params["l2"], params["k"]
        return as_rational(Fraction(l1 * l2, k * k) * binom_general((l1 - 1) * (l2 - 1) * k - 1, k - 1))
    if kind == "dm1d":
        l1, l2, d = params["l1"], params["l2"], params["d"]
        return as_rational(
            Fraction(l1 * l2, d * ((l1 - 1) * d + 1))
            * binom_general((l1 - 1) * (l2 - 1) * d + l2 - 1, d - 1)
        )
    if kind == "sgw":
        l1, l2, a, b, k = params["l1"], params["l2"], params["a"], params["b"], params["k"]
        chi = params["chi"]
        E = E_value(l1, l2, a, b)
        if E == 0:
            raise UseLogRouteError("use log-route: E = 0")
        total = Fraction(0)
        for r in _ordered_partitions_by_weight(k):
            term = Fraction(1)
            for i, ri in enumerate(r, start=1):
                if ri:
                    c = chi[i - 1] if i - 1 < len(chi) else 0
                    term *= binom_general(E * k * i * c + ri - 1, ri)
            total += term
        return as_rational(total / (E * k * k))
    raise ValueError(f"unknown closed form {kind!r}")


def _mobius(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def bps_moebius(N_values: Sequence[Rational], sign_exponent: int) -> list[Rational]:
    """sum_{d|k} mu(k/d) (-1)^(sign_exponent (d-k)) d^2/k^2 N[d], for k = 1..len(N_values)."""
    out = []
    for k in range(1, len(N_values) + 1):
        acc = Fraction(0)
        for d in range(1, k + 1):
            if k % d == 0:
                sign = -1 if (sign_exponent * (d - k)) % 2 else 1
                acc += _mobius(k // d) * sign * Fraction(d * d, k * k) * N_values[d - 1]
        out.append(as_rational(acc))
    return out


def product_factorization(f_t: Sequence[Rational], sign: int) -> list[Rational]:
    """Exponents d(k), k = 1..K, with f(t) = prod_k (1 - (sign t)^k)^(-k d(k)).

    From log f = sum_n L_n t^n one gets n^2 d(n) = sum_{k|n} mu(n/k) k sign^k L_k.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not f_t or f_t[0] != 1:
        raise ValueError("f must have constant term 1")
    L = coefficients(univariate(f_t).log())
    out = []
    for n in range(1, len(L)):
        acc = Fraction(0)
        for k in range(1, n + 1):
            if n % k == 0:
                acc += _mobius(n // k) * k * sign**k * Fraction(L[k])
        out.append(as_rational(acc / (n * n)))
    return out


def reassemble_product(d: Sequence[Rational], sign: int, K: int) -> list[Rational]:
    """Coefficients of prod_k (1 - (sign t)^k)^(-k d(k)) to order K."""
    acc = TruncatedSeries.zero(UNIVARIATE, K)
    for k, dk in enumerate(d, start=1):
        if dk and k <= K:
            factor = univariate([1] + [0] * (k - 1) + [-(sign**k)], K)
            acc = acc + factor.log() * (-k * dk)
    return coefficients(acc.exp())


def balanced_sign(m: int, a: int, b: int) -> int:
    """(-1)^(m a b - a^2 - b^2), the sign in the product factorization for l1 = l2 = m."""
    return -1 if (m * a * b - a * a - b * b) % 2 else 1


__all__ = [
    "ChiTable",
    "RSystemSolution",
    "SpecializedContext",
    "MissingChiError",
    "ExtractionError",
    "UseLogRouteError",
    "solve_R_system",
    "extract_chi",
    "solve_specialized",
    "central_system",
    "closed_form_N",
    "bps_moebius",
    "product_factorization",
    "reassemble_product",
    "N_from_log",
    "E_value",
    "balanced_sign",
    "univariate",
    "coefficients",
]
