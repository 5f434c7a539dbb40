from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from tvx.series import (
    ConstantTermError,
    ContextMismatchError,
    SeriesContext,
    TruncatedSeries,
    VariableSpec,
    bipartite_context,
)

U = SeriesContext([VariableSpec("u", "X")])
CTX = bipartite_context(1, 2)


def uni(coeffs, order):
    return TruncatedSeries.from_terms(U, order, [((i,), c) for i, c in enumerate(coeffs)])


def test_ring_examples():
    assert uni([1, 1], 2) * uni([1, -1], 2) == uni([1, 0, -1], 2)
    v = TruncatedSeries.variable(CTX, 3, "s1")
    assert (v + 1) * TruncatedSeries.one(CTX, 3) == v + 1
    t1 = TruncatedSeries.variable(CTX, 3, "t1")
    t2 = TruncatedSeries.variable(CTX, 3, "t2")
    assert (1 + t1) * (1 + t2) == 1 + t1 + t2 + t1 * t2


def test_context_mismatch():
    with pytest.raises(ContextMismatchError):
        TruncatedSeries.one(CTX, 2) + TruncatedSeries.one(U, 2)


def test_inverse_examples():
    assert uni([1, -1], 5).inverse() == uni([1] * 6, 5)
    assert uni([1, 1], 4).inverse() == uni([1, -1, 1, -1, 1], 4)
    assert uni([2], 3).inverse() == uni([Fraction(1, 2)], 3)
    with pytest.raises(ConstantTermError):
        uni([0, 1], 3).inverse()


def test_log_exp_examples():
    assert uni([1, 1], 4).log() == uni([0, 1, Fraction(-1, 2), Fraction(1, 3), Fraction(-1, 4)], 4)
    assert TruncatedSeries.zero(U, 4).exp() == TruncatedSeries.one(U, 4)
    assert (uni([1, 1], 5) ** 2).log() == uni([1, 1], 5).log() * 2
    with pytest.raises(ConstantTermError):
        uni([2, 1], 3).log()
    with pytest.raises(ConstantTermError):
        uni([1, 1], 3).exp()


def test_pow_rational_examples():
    assert (uni([1, 1], 4) ** 2).pow_rational(Fraction(1, 2)) == uni([1, 1], 4)
    assert uni([1, 1], 3).pow_rational(Fraction(1, 2)) == uni([1, Fraction(1, 2), Fraction(-1, 8), Fraction(1, 16)], 3)


def test_slope_component_and_diagonal():
    ctx = bipartite_context(1, 1)
    s = TruncatedSeries.monomial(ctx, 4, (1, 0))
    st_ = TruncatedSeries.monomial(ctx, 4, (1, 1))
    f = 1 + s + st_
    assert f.slope_component(1, 1) == 1 + st_
    assert f.slope_component(1, 0) == 1 + s
    with pytest.raises(ValueError):
        f.slope_component(0, 0)
    assert (1 + st_).specialize_diagonal(1, 1) == [1, 1, 0]
    assert TruncatedSeries.one(ctx, 0).specialize_diagonal(1, 1) == [1]


def test_json_round_trip():
    f = (1 + TruncatedSeries.variable(CTX, 4, "s1")).pow_rational(Fraction(1, 3))
    assert TruncatedSeries.from_json(f.to_json()) == f


# -- properties ------------------------------------------------------------------

coef = st.integers(-3, 3)


@st.composite
def series(draw, const=None, order=4):
    terms = draw(st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1)), coef, max_size=6))
    terms = {e: c for e, c in terms.items() if sum(e) > 0}
    f = TruncatedSeries.from_terms(CTX, order, terms)
    if const is not None:
        f = f + const
    return f


@settings(max_examples=60, deadline=None)
@given(series(const=1))
def test_exp_log_round_trip(f):
    assert f.log().exp() == f


@settings(max_examples=60, deadline=None)
@given(series(const=0))
def test_log_exp_round_trip(g):
    assert g.exp().log() == g


@settings(max_examples=40, deadline=None)
@given(series(const=1), st.integers(1, 5))
def test_pow_rational_round_trip(f, b):
    assert f.pow_rational(b).pow_rational(Fraction(1, b)) == f
    assert f.pow_rational(b) == f ** b


@settings(max_examples=60, deadline=None)
@given(series(const=1))
def test_inverse(f):
    assert f * f.inverse() == TruncatedSeries.one(CTX, f.order)


@settings(max_examples=60, deadline=None)
@given(series(const=1), series(const=1))
def test_log_homomorphism(f, g):
    assert (f * g).log() == f.log() + g.log()


@settings(max_examples=40, deadline=None)
@given(series(const=1))
def test_slope_components_partition_support(f):
    parts = TruncatedSeries.zero(CTX, f.order)
    seen = set()
    for _, key, _ in f.packed_items():
        if key == 0:
            continue
        p, q = CTX.bidegree(key)
        g = gcd(p, q)
        seen.add((p // g, q // g))
    for a, b in seen:
        parts = parts + (f.slope_component(a, b) - f.constant_term)
    assert parts + f.constant_term == f
