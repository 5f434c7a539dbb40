"""Poincare polynomials of stable quiver moduli by the resolved Harder-Narasimhan recursion.

For Theta-coprime d,

    P_d(q) = (q-1) * sum over decompositions d = d^1 + ... + d^s with
             mu(d^1 + ... + d^k) > mu(d) for k < s of
             (-1)^(s-1) q^(-sum_{k<=l} <d^l, d^k>) prod_k prod_i prod_{j<=d^k_i} (1-q^-j)^-1.

The sum is evaluated as a dynamic programme over partial sums e <= d, which
is the same alternating sum grouped by the sequence of prefixes.  Laurent
polynomials in q are kept as {exponent: int} dicts until the single final
division.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator

from .numerics import QRationalFunction, poly_mul, rf_eval_at_one, rf_normalize
from .quiver import (
    BipartiteQuiver,
    DimVector,
    StabilitySpec,
    euler_form,
    is_theta_coprime,
    slope,
    subvectors,
)


class NotCoprimeError(ValueError):
    """The dimension vector has a proper subvector of the same slope."""


class HNInternalError(ArithmeticError):
    """The assembled sum did not reduce to a polynomial."""


@dataclass(frozen=True)
class PoincarePolynomial:
    coeffs: tuple[int, ...]
    quiver: BipartiteQuiver
    d: DimVector

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_palindromic(self) -> bool:
        return self.coeffs == self.coeffs[::-1]

    def at_one(self) -> int:
        return sum(self.coeffs)

    def to_json(self) -> dict:
        return {"dim": self.d.to_json(), "coefficients": list(self.coeffs)}


# -- decompositions -----------------------------------------------------------


def hn_decompositions(Q: BipartiteQuiver, spec: StabilitySpec, d: DimVector) -> Iterator[tuple[DimVector, ...]]:
    """Ordered tuples (d^1, ..., d^s) summing to d whose proper prefix sums have slope > mu(d)."""
    Q.check(d)
    if d.is_zero():
        raise ValueError("d must be nonzero")
    mu = slope(spec, d)
    l1 = len(d.p1)
    ents = d.entries

    def rec(prefix: tuple[int, ...], parts: list[DimVector]):
        rest = [x - p for x, p in zip(ents, prefix)]
        for step in product(*(range(r + 1) for r in rest)):
            if not any(step):
                continue
            e = tuple(p + s for p, s in zip(prefix, step))
            part = DimVector(step[:l1], step[l1:])
            if e == ents:
                yield tuple(parts + [part])
                continue
            if slope(spec, DimVector(e[:l1], e[l1:])) > mu:
                yield from rec(e, parts + [part])

    yield from rec((0,) * len(ents), [])


def hn_decompositions_bruteforce(Q: BipartiteQuiver, spec: StabilitySpec, d: DimVector) -> list[tuple[DimVector, ...]]:
    """Every ordered tuple of nonzero vectors summing to d, filtered afterwards (test oracle)."""
    Q.check(d)
    mu = slope(spec, d)
    out = []

    def all_tuples(rem: DimVector):
        if rem.is_zero():
            yield ()
            return
        for first in subvectors(rem, proper=False):
            for tail in all_tuples(rem - first):
                yield (first,) + tail

    for dec in all_tuples(d):
        acc = None
        ok = True
        for part in dec[:-1]:
            acc = part if acc is None else acc + part
            if not slope(spec, acc) > mu:
                ok = False
                break
        if ok:
            out.append(dec)
    return out


# -- Laurent polynomial helpers -------------------------------------------------


def _lmul(a: dict, b: dict) -> dict:
    out: dict[int, int] = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _ladd_into(acc: dict, a: dict, scale: int = 1) -> None:
    for k, v in a.items():
        acc[k] = acc.get(k, 0) + scale * v


@lru_cache(maxsize=None)
def gaussian_binomial(n: int, k: int) -> tuple[int, ...]:
    """[n choose k]_q as a coefficient tuple, lowest degree first."""
    if k < 0 or k > n:
        return ()
    # Pascal: [m, j] = [m-1, j-1] + q^j [m-1, j]
    table = {(0, 0): (1,)}
    for m in range(1, n + 1):
        for j in range(0, min(m, k) + 1):
            a = table.get((m - 1, j - 1), ()) if j else ()
            b = table.get((m - 1, j), ())
            out = [0] * max(len(a), len(b) + j)
            for i, c in enumerate(a):
                out[i] += c
            for i, c in enumerate(b):
                out[i + j] += c
            while out and out[-1] == 0:
                out.pop()
            table[(m, j)] = tuple(out)
    return table[(n, k)]


def _gauss_dict(n: int, k: int) -> dict:
    return {i: c for i, c in enumerate(gaussian_binomial(n, k)) if c}


# -- the recursion --------------------------------------------------------------


def poincare_rational(Q: BipartiteQuiver, spec: StabilitySpec, d: DimVector) -> QRationalFunction:
    """The full alternating sum as a reduced rational function (no coprimality check)."""
    Q.check(d)
    if d.is_zero():
        raise ValueError("d must be nonzero")
    mu = slope(spec, d)
    l1 = len(d.p1)
    ents = d.entries

    def dv(e) -> DimVector:
        return DimVector(e[:l1], e[l1:])

    states = sorted(product(*(range(x + 1) for x in ents)), key=sum)
    valid = {e for e in states if e == ents or (any(e) and slope(spec, dv(e)) > mu)}
    zero = (0,) * len(ents)
    W: dict[tuple, dict] = {zero: {0: -1}}
    for e in states:
        if e == zero or e not in valid:
            continue
        acc: dict[int, int] = {}
        ed = dv(e)
        for ep, wp in W.items():
            if ep == e or any(a > b for a, b in zip(ep, e)):
                continue
            delta = tuple(b - a for a, b in zip(ep, e))
            shift = sum(x * (x + 1) // 2 for x in delta) - euler_form(Q, dv(delta), ed)
            term = {shift: -1}
            for n_, k_ in zip(e, ep):
                if n_ != k_ and k_:
                    term = _lmul(term, _gauss_dict(n_, k_))
            _ladd_into(acc, _lmul(wp, term))
        W[e] = {k: v for k, v in acc.items() if v}
    top = _lmul(W.get(ents, {}), {1: 1, 0: -1})
    if not top:
        return QRationalFunction((), (1,))
    lo = min(top)
    num = [0] * (max(top) - lo + 1)
    for k, v in top.items():
        num[k - lo] = v
    den: list = [1]
    for x in ents:
        for j in range(1, x + 1):
            den = poly_mul(den, [-1] + [0] * (j - 1) + [1])
    return rf_normalize(num, den, q_shift=lo)


def poincare(Q: BipartiteQuiver, spec: StabilitySpec, d: DimVector) -> PoincarePolynomial:
    if not is_theta_coprime(spec, d):
        raise NotCoprimeError(f"{d} is not coprime for the given stability")
    rf = poincare_rational(Q, spec, d)
    if not rf.is_polynomial():
        raise HNInternalError(f"HN sum for {d} is not a polynomial: {rf!r}")
    coeffs = tuple(int(c) for c in rf.num)
    if any(c != rf.num[i] for i, c in enumerate(coeffs)):
        raise HNInternalError("non-integral Poincare coefficient")
    return PoincarePolynomial(coeffs, Q, d)


def euler_stable(Q: BipartiteQuiver, spec: StabilitySpec, d: DimVector) -> int:
    p = poincare(Q, spec, d)
    return int(rf_eval_at_one(QRationalFunction(p.coeffs)))
