"""Counting tree-shaped localization data.

A tree here is a finite subtree of the universal cover of K(l1, l2), rooted
at a source: each source carries all of its l1 sink neighbours, and each
sink may carry any subset of its l2 - 1 further source neighbours.  With x
marking sinks, the trees hanging below a sink have generating function y
with y = x * phi(y), phi(u) = (1 + u^(l1-1))^(l2-1), so trees with d
sources are counted by [x^n] y^l1 for n = (l1-1) d + 1.

The weighted count (l2 / d) * #trees equals the closed form in
:func:`tree_formula`.  Checked against the HN route, the closed form is the
sum of Euler characteristics over dimension vectors with d - 1 at the sinks
and d at the sources; see :func:`hn_tree_sum`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

from .funceq import UNIVARIATE, coefficients, univariate
from .hn import euler_stable
from .numerics import Rational, as_rational, binom_general
from .quiver import BipartiteQuiver, DimVector, StabilitySpec, compositions, rearrangement_count
from .series import TruncatedSeries


class LagrangeMismatchError(ArithmeticError):
    pass


def _lagrange_iterative(l1: int, l2: int, n: int) -> Rational:
    """[x^n] y^l1 with y = x phi(y), by fixed-point iteration to order n."""
    x = univariate([0, 1], n)
    one = TruncatedSeries.one(UNIVARIATE, n)
    y = TruncatedSeries.zero(UNIVARIATE, n)
    for _ in range(n + 1):
        inner = one if l1 == 1 else y ** (l1 - 1)
        new = x * ((one + inner) ** (l2 - 1))
        if new == y:
            break
        y = new
    return coefficients(y ** l1)[n]


def _lagrange_closed(l1: int, l2: int, n: int) -> Rational:
    """(l1/n) [u^(n-l1)] phi(u)^n."""
    if n < l1:
        return 0
    if l1 == 1:
        # phi is the constant 2^(l2-1)
        return as_rational(Fraction(2 ** (n * (l2 - 1)), n)) if n == 1 else 0
    if (n - l1) % (l1 - 1):
        return 0
    j = (n - l1) // (l1 - 1)
    return as_rational(Fraction(l1, n) * binom_general(n * (l2 - 1), j))


def lagrange_coeff(l1: int, l2: int, n: int) -> Rational:
    """[x^n] y^l1, computed by iteration and by Lagrange inversion; both must agree."""
    if l1 < 1 or l2 < 1 or n < 1:
        raise ValueError("l1, l2 and n must be positive")
    it = _lagrange_iterative(l1, l2, n)
    closed = _lagrange_closed(l1, l2, n)
    if it != closed:
        raise LagrangeMismatchError(f"iteration {it} != closed form {closed} at ({l1},{l2},{n})")
    return it


def tree_formula(l1: int, l2: int, d: int) -> Rational:
    """l1 l2 / (d ((l1-1) d + 1)) * binom((l2-1)(l1-1) d + l2 - 1, d - 1)."""
    if d < 1:
        raise ValueError("d must be positive")
    return as_rational(
        Fraction(l1 * l2, d * ((l1 - 1) * d + 1)) * binom_general((l2 - 1) * (l1 - 1) * d + l2 - 1, d - 1)
    )


# -- direct enumeration ----------------------------------------------------------


def enumerate_tree_shapes(l1: int, l2: int, d: int) -> list:
    """All trees with d sources, as nested tuples (for small cases and tests).

    A source is a tuple of its sink children; a sink is a tuple of
    (colour, source) pairs for the source children it carries.
    """

    @lru_cache(maxsize=None)
    def sources(children: int, j: int) -> tuple:
        # a source with ``children`` sink children and j sources in total
        return tuple(sinks_list(children, j - 1))

    def sinks_list(count: int, j: int):
        if count == 0:
            if j == 0:
                yield ()
            return
        for first in range(j + 1):
            for s in sink(first):
                for rest in sinks_list(count - 1, j - first):
                    yield (s,) + rest

    @lru_cache(maxsize=None)
    def sink(j: int) -> tuple:
        out = []
        for r in range(min(j, l2 - 1) + 1):
            for colours in combinations(range(l2 - 1), r):
                for split in compositions(j, r):
                    if any(x == 0 for x in split):
                        continue
                    for subtrees in _product_lists([sources(l1 - 1, x) for x in split]):
                        out.append(tuple(zip(colours, subtrees)))
        return tuple(out)

    return list(sources(l1, d))


def _product_lists(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _product_lists(lists[1:]):
            yield (head,) + tail


def count_trees(l1: int, l2: int, d: int) -> int:
    """Number of trees with d sources, by a recursive count over the same choices."""

    @lru_cache(maxsize=None)
    def src(children: int, j: int) -> int:
        return forest(children, j - 1)

    @lru_cache(maxsize=None)
    def forest(count: int, j: int) -> int:
        if count == 0:
            return 1 if j == 0 else 0
        return sum(snk(first) * forest(count - 1, j - first) for first in range(j + 1))

    @lru_cache(maxsize=None)
    def snk(j: int) -> int:
        total = 0
        for r in range(min(j, l2 - 1) + 1):
            ways = 0
            for split in compositions(j, r):
                if all(split):
                    prod = 1
                    for x in split:
                        prod *= src(l1 - 1, x)
                    ways += prod
            total += comb(l2 - 1, r) * ways
        return total

    return src(l1, d)


def enumerate_trees(l1: int, l2: int, d: int) -> Rational:
    """(l2 / d) * number of trees: l2 colours for the root source, d choices of root."""
    if d < 1:
        raise ValueError("d must be positive")
    return as_rational(Fraction(l2 * count_trees(l1, l2, d), d))


# -- cross-check against the HN route ---------------------------------------------


def hn_tree_sum(l1: int, l2: int, d: int) -> int:
    """Sum of stable Euler characteristics of K(l1,l2) over sink total d-1, source total d."""
    Q = BipartiteQuiver.complete(l1, l2)
    spec = StabilitySpec.default(Q)
    total = 0
    for p in compositions(d - 1, l1):
        if list(p) != sorted(p, reverse=True):
            continue
        for r in compositions(d, l2):
            if list(r) != sorted(r, reverse=True):
                continue
            total += rearrangement_count(p) * rearrangement_count(r) * euler_stable(Q, spec, DimVector(p, r))
    return total


@dataclass
class TreeReport:
    l1: int
    l2: int
    d: int
    formula: Rational
    enumeration: Rational | None
    hn: int | None

    @property
    def agree(self) -> bool:
        vals = [v for v in (self.formula, self.enumeration, self.hn) if v is not None]
        return all(v == vals[0] for v in vals)

    @property
    def status(self) -> str:
        if self.hn is None:
            return "formula-unverified"
        return "verified" if self.agree else "mismatch"

    def to_json(self) -> dict:
        return {
            "l1": self.l1,
            "l2": self.l2,
            "d": self.d,
            "formula": str(self.formula),
            "enumeration": None if self.enumeration is None else str(self.enumeration),
            "hn": self.hn,
            "status": self.status,
        }


ENUMERATION_BUDGET = 5
HN_BUDGET = 10


def tree_report(l1: int, l2: int, d: int) -> TreeReport:
    enum = enumerate_trees(l1, l2, d) if d <= ENUMERATION_BUDGET else None
    hn = hn_tree_sum(l1, l2, d) if (2 * d - 1) <= HN_BUDGET else None
    return TreeReport(l1, l2, d, tree_formula(l1, l2, d), enum, hn)
