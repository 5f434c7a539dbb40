"""Truncated multivariate power series with exact coefficients.

A series lives in a :class:`SeriesContext` (the ordered variable list) and is
truncated at a total-degree order N: every stored monomial has
sum(exponents) <= N.  Variables carry an axis (X or Y) and a positive
weight; the (x, y) bidegree of a monomial is derived from these and never
stored.

Internally an exponent vector is packed into one int (``_SHIFT`` bits per
variable) so that multiplying monomials is integer addition, and terms are
bucketed by total degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence

from .numerics import Rational, as_rational, rational_from_str, rational_to_str

_SHIFT = 12
_MASK = (1 << _SHIFT) - 1
MAX_ORDER = _MASK


class ContextMismatchError(ValueError):
    pass


class ConstantTermError(ValueError):
    pass


@dataclass(frozen=True)
class VariableSpec:
    name: str
    axis: str
    weight: int = 1

    def __post_init__(self):
        if self.axis not in ("X", "Y"):
            raise ValueError(f"axis must be 'X' or 'Y', got {self.axis!r}")
        if self.weight < 1:
            raise ValueError("weight must be a positive integer")

    def to_json(self) -> dict:
        return {"name": self.name, "axis": self.axis, "weight": self.weight}


class SeriesContext:
    """Ordered variable list plus caches for packed-monomial metadata."""

    def __init__(self, variables: Iterable[VariableSpec]):
        self.variables = tuple(variables)
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.nvars = len(self.variables)
        self._wx = [v.weight if v.axis == "X" else 0 for v in self.variables]
        self._wy = [v.weight if v.axis == "Y" else 0 for v in self.variables]
        self._bideg: dict[int, tuple[int, int]] = {}

    def __eq__(self, other):
        return isinstance(other, SeriesContext) and self.variables == other.variables

    def __hash__(self):
        return hash(self.variables)

    def __repr__(self):
        return f"SeriesContext({[v.name for v in self.variables]})"

    def index(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise KeyError(name)

    def pack(self, exponents: Sequence[int]) -> int:
        if len(exponents) != self.nvars:
            raise ValueError(f"expected {self.nvars} exponents, got {len(exponents)}")
        key = 0
        for i, e in enumerate(exponents):
            if e < 0 or e > _MASK:
                raise ValueError(f"exponent out of range: {e}")
            key |= e << (_SHIFT * i)
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> (_SHIFT * i)) & _MASK for i in range(self.nvars))

    def bidegree(self, key: int) -> tuple[int, int]:
        bd = self._bideg.get(key)
        if bd is None:
            exps = self.unpack(key)
            bd = (
                sum(w * e for w, e in zip(self._wx, exps)),
                sum(w * e for w, e in zip(self._wy, exps)),
            )
            self._bideg[key] = bd
        return bd

    def min_weight(self, axis: str) -> int:
        ws = [v.weight for v in self.variables if v.axis == axis]
        return min(ws) if ws else 1

    def to_json(self) -> list[dict]:
        return [v.to_json() for v in self.variables]

    @classmethod
    def from_json(cls, doc: list[dict]) -> "SeriesContext":
        return cls(VariableSpec(d["name"], d["axis"], int(d.get("weight", 1))) for d in doc)


def bipartite_context(l1: int, l2: int) -> SeriesContext:
    """Variables s_1..s_l1 (axis X) and t_1..t_l2 (axis Y), all of weight 1."""
    return SeriesContext(
        [VariableSpec(f"s{k}", "X") for k in range(1, l1 + 1)]
        + [VariableSpec(f"t{l}", "Y") for l in range(1, l2 + 1)]
    )


def levelled_context(levels_x: Sequence[int], levels_y: Sequence[int]) -> SeriesContext:
    """One variable per vertex; ``levels_x[i]`` is the weight of the i-th X variable.

    ``levels_x`` lists the level of each sink vertex (e.g. [1, 1, 2] for two
    level-1 and one level-2 vertex).
    """
    variables = []
    counts: dict[tuple[str, int], int] = {}
    for axis, prefix, levels in (("X", "s", levels_x), ("Y", "t", levels_y)):
        for r in levels:
            counts[(axis, r)] = counts.get((axis, r), 0) + 1
            variables.append(VariableSpec(f"{prefix}{r}_{counts[(axis, r)]}", axis, r))
    return SeriesContext(variables)


def _mul_into(out: dict, a: Mapping, b: Mapping) -> None:
    get = out.get
    for k1, c1 in a.items():
        for k2, c2 in b.items():
            k = k1 + k2
            out[k] = get(k, 0) + c1 * c2


def _clean(bucket: dict) -> dict:
    out = {}
    for k, c in bucket.items():
        if c:
            if type(c) is Fraction and c.denominator == 1:
                c = c.numerator
            out[k] = c
    return out


def _div(c: Rational, n: int) -> Rational:
    if type(c) is int and c % n == 0:
        return c // n
    return as_rational(Fraction(c) / n)


class TruncatedSeries:
    """Immutable truncated power series.  Build with the classmethods."""

    __slots__ = ("ctx", "order", "_h")

    def __init__(self, ctx: SeriesContext, order: int, buckets: list[dict]):
        if order < 0 or order > MAX_ORDER:
            raise ValueError(f"order out of range: {order}")
        self.ctx = ctx
        self.order = order
        if len(buckets) < order + 1:
            buckets = list(buckets) + [{} for _ in range(order + 1 - len(buckets))]
        self._h = buckets[: order + 1]

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, ctx: SeriesContext, order: int) -> "TruncatedSeries":
        return cls(ctx, order, [{} for _ in range(order + 1)])

    @classmethod
    def constant(cls, ctx: SeriesContext, order: int, c: Rational) -> "TruncatedSeries":
        s = cls.zero(ctx, order)
        if c:
            s._h[0][0] = as_rational(c)
        return s

    @classmethod
    def one(cls, ctx: SeriesContext, order: int) -> "TruncatedSeries":
        return cls.constant(ctx, order, 1)

    @classmethod
    def monomial(
        cls, ctx: SeriesContext, order: int, exponents: Sequence[int], coeff: Rational = 1
    ) -> "TruncatedSeries":
        s = cls.zero(ctx, order)
        deg = sum(exponents)
        if deg <= order and coeff:
            s._h[deg][ctx.pack(exponents)] = as_rational(coeff)
        return s

    @classmethod
    def variable(cls, ctx: SeriesContext, order: int, name: str) -> "TruncatedSeries":
        exps = [0] * ctx.nvars
        exps[ctx.index(name)] = 1
        return cls.monomial(ctx, order, exps)

    @classmethod
    def from_terms(
        cls, ctx: SeriesContext, order: int, terms: Mapping[Sequence[int], Rational] | Iterable
    ) -> "TruncatedSeries":
        s = cls.zero(ctx, order)
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exps, c in items:
            deg = sum(exps)
            if deg > order:
                continue
            key = ctx.pack(exps)
            b = s._h[deg]
            b[key] = b.get(key, 0) + as_rational(c)
        s._h = [_clean(b) for b in s._h]
        return s

    @classmethod
    def _from_packed(cls, ctx: SeriesContext, order: int, buckets: list[dict]) -> "TruncatedSeries":
        return cls(ctx, order, [_clean(b) for b in buckets])

    # -- inspection ---------------------------------------------------------

    def homogeneous(self, degree: int) -> dict:
        """Packed-key view of the degree-``degree`` part (do not mutate)."""
        if degree > self.order:
            return {}
        return self._h[degree]

    @property
    def constant_term(self) -> Rational:
        return self._h[0].get(0, 0)

    def coeff(self, exponents: Sequence[int]) -> Rational:
        deg = sum(exponents)
        if deg > self.order:
            raise ValueError("monomial beyond truncation order")
        return self._h[deg].get(self.ctx.pack(exponents), 0)

    def packed_items(self) -> Iterator[tuple[int, int, Rational]]:
        for d, b in enumerate(self._h):
            for k, c in b.items():
                yield d, k, c

    def terms(self) -> list[tuple[tuple[int, ...], Rational]]:
        """All (exponents, coeff) pairs in lexicographic exponent order."""
        out = [(self.ctx.unpack(k), c) for b in self._h for k, c in b.items()]
        out.sort()
        return out

    def __len__(self) -> int:
        return sum(len(b) for b in self._h)

    def is_zero(self) -> bool:
        return not any(self._h)

    def valuation(self) -> int | None:
        """Lowest degree with a nonzero term (None for the zero series)."""
        for d, b in enumerate(self._h):
            if b:
                return d
        return None

    def is_integral(self) -> bool:
        return all(type(c) is int for b in self._h for c in b.values())

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.ctx == other.ctx and self.order == other.order and self._h == other._h

    def __hash__(self):
        return hash((self.ctx, self.order, tuple(tuple(sorted(b.items())) for b in self._h)))

    def equal_to_order(self, other: "TruncatedSeries", order: int | None = None) -> bool:
        self._check(other)
        n = min(self.order, other.order) if order is None else order
        return all(self._h[d] == other._h[d] for d in range(n + 1))

    def __repr__(self):
        body = " + ".join(f"{c}*{list(e)}" for e, c in self.terms()[:8])
        more = " + ..." if len(self) > 8 else ""
        return f"TruncatedSeries(order={self.order}, {body or '0'}{more})"

    # -- ring operations ----------------------------------------------------

    def _check(self, other: "TruncatedSeries"):
        if self.ctx != other.ctx:
            raise ContextMismatchError("series live in different variable contexts")

    def truncate(self, order: int) -> "TruncatedSeries":
        if order >= self.order:
            return self
        return TruncatedSeries(self.ctx, order, self._h[: order + 1])

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self + TruncatedSeries.constant(self.ctx, self.order, other)
        self._check(other)
        n = min(self.order, other.order)
        out = []
        for d in range(n + 1):
            b = dict(self._h[d])
            for k, c in other._h[d].items():
                b[k] = b.get(k, 0) + c
            out.append(b)
        return TruncatedSeries._from_packed(self.ctx, n, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.ctx, self.order, [{k: -c for k, c in b.items()} for b in self._h])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Rational) -> "TruncatedSeries":
        if not c:
            return TruncatedSeries.zero(self.ctx, self.order)
        return TruncatedSeries._from_packed(
            self.ctx, self.order, [{k: v * c for k, v in b.items()} for b in self._h]
        )

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(as_rational(other))
        self._check(other)
        n = min(self.order, other.order)
        out = [{} for _ in range(n + 1)]
        for d1 in range(n + 1):
            a = self._h[d1]
            if not a:
                continue
            for d2 in range(n - d1 + 1):
                b = other._h[d2]
                if b:
                    _mul_into(out[d1 + d2], a, b)
        return TruncatedSeries._from_packed(self.ctx, n, out)

    def __rmul__(self, other):
        return self.scale(as_rational(other))

    def mul_monomial(self, key: int, degree: int, coeff: Rational = 1) -> "TruncatedSeries":
        """Multiply by coeff * (packed monomial of the given degree)."""
        out = [{} for _ in range(self.order + 1)]
        for d in range(self.order - degree + 1):
            out[d + degree] = {k + key: c * coeff for k, c in self._h[d].items()}
        return TruncatedSeries._from_packed(self.ctx, self.order, out)

    def inverse(self) -> "TruncatedSeries":
        c0 = self.constant_term
        if not c0:
            raise ConstantTermError("inverse requires a nonzero constant term")
        inv0 = as_rational(Fraction(1) / Fraction(c0))
        n = self.order
        h = [{0: inv0}]
        for m in range(1, n + 1):
            acc: dict = {}
            for k in range(1, m + 1):
                if self._h[k] and h[m - k]:
                    _mul_into(acc, self._h[k], h[m - k])
            h.append(_clean({key: -inv0 * c for key, c in acc.items()}))
        return TruncatedSeries(self.ctx, n, h)

    def __pow__(self, e: int) -> "TruncatedSeries":
        if not isinstance(e, int):
            raise TypeError("use pow_rational for non-integer exponents")
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = TruncatedSeries.one(self.ctx, self.order)
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def log(self) -> "TruncatedSeries":
        """Logarithm of a series with constant term 1 (degree-operator recurrence)."""
        if self.constant_term != 1:
            raise ConstantTermError("log requires constant term 1")
        inv = self.inverse()
        n = self.order
        out = [{}]
        for m in range(1, n + 1):
            acc: dict = {}
            for k in range(1, m + 1):
                if self._h[k] and inv._h[m - k]:
                    scaled = {key: k * c for key, c in self._h[k].items()}
                    _mul_into(acc, scaled, inv._h[m - k])
            out.append(_clean({key: _div(c, m) for key, c in acc.items()}))
        return TruncatedSeries(self.ctx, n, out)

    def exp(self) -> "TruncatedSeries":
        """Exponential of a series with constant term 0."""
        if self.constant_term != 0:
            raise ConstantTermError("exp requires constant term 0")
        n = self.order
        f = [{0: 1}]
        for m in range(1, n + 1):
            acc: dict = {}
            for k in range(1, m + 1):
                if self._h[k] and f[m - k]:
                    scaled = {key: k * c for key, c in self._h[k].items()}
                    _mul_into(acc, scaled, f[m - k])
            f.append(_clean({key: _div(c, m) for key, c in acc.items()}))
        return TruncatedSeries(self.ctx, n, f)

    def pow_rational(self, r: Rational) -> "TruncatedSeries":
        """f**r = exp(r log f) for f with constant term 1."""
        if self.constant_term != 1:
            raise ConstantTermError("pow_rational requires constant term 1")
        return (self.log() * as_rational(r)).exp()

    # -- bidegree filters ---------------------------------------------------

    def bidegree(self, exponents: Sequence[int]) -> tuple[int, int]:
        return self.ctx.bidegree(self.ctx.pack(exponents))

    def filter_packed(self, keep) -> "TruncatedSeries":
        return TruncatedSeries(
            self.ctx, self.order, [{k: c for k, c in b.items() if keep(k)} for b in self._h]
        )

    def slope_component(self, a: int, b: int) -> "TruncatedSeries":
        """Constant term plus the monomials whose bidegree is a multiple of (a, b)."""
        if a == 0 and b == 0:
            raise ValueError("(a, b) must be nonzero")
        g = gcd(a, b)
        a, b = a // g, b // g
        bideg = self.ctx.bidegree
        return self.filter_packed(lambda k: (lambda p, q: p * b == q * a)(*bideg(k)))

    def exact_levels(self, a: int, b: int) -> int:
        """Largest k such that every monomial of bidegree k(a,b) is within the order."""
        wx, wy = self.ctx.min_weight("X"), self.ctx.min_weight("Y")
        k = 0
        while (k + 1) * a // wx + (k + 1) * b // wy <= self.order:
            k += 1
        return k

    def level_of(self, key: int, a: int, b: int) -> int:
        p, q = self.ctx.bidegree(key)
        k = p // a if a else q // b
        if (p, q) != (k * a, k * b):
            raise ValueError(f"monomial {self.ctx.unpack(key)} not on the ray through ({a},{b})")
        return k

    def specialize_diagonal(self, a: int, b: int) -> list[Rational]:
        """Coefficients c_0..c_K of f(t) = sum_k c_k ((tx)^a (ty)^b)^k.

        K is the number of levels fully determined by the truncation order.
        """
        if gcd(a, b) != 1:
            raise ValueError("(a, b) must be primitive")
        K = self.exact_levels(a, b)
        out: list[Rational] = [0] * (K + 1)
        for _, key, c in self.packed_items():
            k = self.level_of(key, a, b)
            if k <= K:
                out[k] += c
        return [as_rational(c) for c in out]

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "context": self.ctx.to_json(),
            "order": self.order,
            "terms": [
                {"exponents": list(e), "coeff": rational_to_str(c)} for e, c in self.terms()
            ],
        }

    @classmethod
    def from_json(cls, doc: dict, ctx: SeriesContext | None = None) -> "TruncatedSeries":
        ctx = ctx or SeriesContext.from_json(doc["context"])
        return cls.from_terms(
            ctx,
            int(doc["order"]),
            [(tuple(t["exponents"]), rational_from_str(str(t["coeff"]))) for t in doc["terms"]],
        )


def product(factors: Iterable[TruncatedSeries], ctx: SeriesContext, order: int) -> TruncatedSeries:
    acc = TruncatedSeries.one(ctx, order)
    for f in factors:
        acc = acc * f
    return acc
