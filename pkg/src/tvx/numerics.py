"""Exact scalars: rationals, univariate rational functions in q, generalized binomials.

Rationals are plain :class:`fractions.Fraction` values (integers are allowed
wherever a rational is expected and are kept as ``int`` for speed).
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


class PoleAtOneError(ArithmeticError):
    """Raised when a reduced rational function has a genuine pole at q=1."""


def as_rational(value) -> Rational:
    """Normalize to ``int`` when integral, ``Fraction`` otherwise."""
    if isinstance(value, int):
        return value
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return value


def rational_to_str(value: Rational) -> str:
    return str(Fraction(value))


def rational_from_str(text: str) -> Rational:
    return as_rational(Fraction(text.replace("−", "-")))


def binom_general(r: Rational, k: int) -> Rational:
    """r (r-1) ... (r-k+1) / k! for rational r and k >= 0."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    num: Rational = 1
    for i in range(k):
        num *= r - i
    return as_rational(Fraction(num) / factorial(k))


# ---------------------------------------------------------------------------
# dense polynomials in q, lowest degree first, coefficients int | Fraction


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly(coeffs: Iterable) -> list:
    return _trim([as_rational(c) for c in coeffs])


def poly_add(p: Sequence, r: Sequence) -> list:
    out = [0] * max(len(p), len(r))
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(r):
        out[i] += c
    return _trim(out)


def poly_neg(p: Sequence) -> list:
    return [-c for c in p]


def poly_mul(p: Sequence, r: Sequence) -> list:
    if not p or not r:
        return []
    out = [0] * (len(p) + len(r) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(r):
            out[i + j] += a * b
    return _trim(out)


def poly_divmod(p: Sequence, r: Sequence) -> tuple[list, list]:
    if not r:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(c) for c in p]
    lead = Fraction(r[-1])
    quot = [Fraction(0)] * max(len(p) - len(r) + 1, 0)
    for shift in range(len(p) - len(r), -1, -1):
        c = rem[shift + len(r) - 1] / lead
        quot[shift] = c
        if c:
            for j, b in enumerate(r):
                rem[shift + j] -= c * b
    return poly(quot), poly(rem[: len(r) - 1])


def poly_gcd(p: Sequence, r: Sequence) -> list:
    """Monic gcd (the zero polynomial only if both inputs vanish)."""
    a, b = poly(p), poly(r)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return []
    lead = Fraction(a[-1])
    return poly(Fraction(c) / lead for c in a)


def poly_eval(p: Sequence, x: Rational) -> Rational:
    acc: Rational = 0
    for c in reversed(p):
        acc = acc * x + c
    return as_rational(acc)


class QRationalFunction:
    """Reduced quotient of polynomials in q with a monic denominator.

    Immutable; equality and hashing use the canonical reduced form.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Sequence, den: Sequence = (1,), *, _reduced: bool = False):
        if _reduced:
            self.num, self.den = tuple(num), tuple(den)
            return
        reduced = rf_normalize(num, den)
        self.num, self.den = reduced.num, reduced.den

    @classmethod
    def constant(cls, c: Rational) -> "QRationalFunction":
        return cls((c,))

    @classmethod
    def q(cls) -> "QRationalFunction":
        return cls((0, 1))

    def is_polynomial(self) -> bool:
        return self.den == (1,)

    def __add__(self, other):
        other = _coerce(other)
        return QRationalFunction(
            poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den)),
            poly_mul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return QRationalFunction(poly_neg(self.num), self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return QRationalFunction(poly_mul(self.num, other.num), poly_mul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if not other.num:
            raise ZeroDivisionError("division by the zero rational function")
        return QRationalFunction(poly_mul(self.num, other.den), poly_mul(self.den, other.num))

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"QRationalFunction({list(self.num)}, {list(self.den)})"

    def to_json(self) -> dict:
        return {
            "numerator": [rational_to_str(c) for c in self.num],
            "denominator": [rational_to_str(c) for c in self.den],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "QRationalFunction":
        return cls(
            [rational_from_str(c) for c in doc["numerator"]],
            [rational_from_str(c) for c in doc["denominator"]],
        )


def _coerce(value) -> QRationalFunction:
    if isinstance(value, QRationalFunction):
        return value
    if isinstance(value, (int, Fraction)):
        return QRationalFunction.constant(value)
    raise TypeError(f"cannot coerce {type(value).__name__} to QRationalFunction")


def rf_normalize(n: Sequence, d: Sequence, q_shift: int = 0) -> QRationalFunction:
    """Reduce n/d (times q**q_shift) to lowest terms with monic denominator.

    ``q_shift`` lets callers pass Laurent data such as q^{-j}: negative shifts
    are cleared into the denominator.
    """
    n, d = poly(n), poly(d)
    if not d:
        raise ZeroDivisionError("zero denominator")
    if q_shift > 0:
        n = [0] * q_shift + n
    elif q_shift < 0:
        d = [0] * (-q_shift) + d
    if not n:
        return QRationalFunction((), (1,), _reduced=True)
    g = poly_gcd(n, d)
    n = poly_divmod(n, g)[0]
    d = poly_divmod(d, g)[0]
    lead = Fraction(d[-1])
    n = poly(Fraction(c) / lead for c in n)
    d = poly(Fraction(c) / lead for c in d)
    return QRationalFunction(n, d, _reduced=True)


def rf_eval_at_one(f: QRationalFunction) -> Rational:
    """Exact value at q=1 of the reduced function."""
    den = poly_eval(f.den, 1)
    if den == 0:
        raise PoleAtOneError("pole-at-one")
    return as_rational(Fraction(poly_eval(f.num, 1)) / den)
