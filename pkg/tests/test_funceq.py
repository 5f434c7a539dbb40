from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tvx import fixtures
from tvx.funceq import (
    ChiTable,
    E_value,
    ExtractionError,
    MissingChiError,
    N_from_log,
    UseLogRouteError,
    balanced_sign,
    bps_moebius,
    central_system,
    closed_form_N,
    coefficients,
    extract_chi,
    product_factorization,
    reassemble_product,
    solve_R_system,
    solve_specialized,
    univariate,
)
from tvx.quiver import DimVector, enum_dimvecs
from tvx.series import TruncatedSeries, bipartite_context


def D(p1, p2):
    return DimVector(tuple(p1), tuple(p2))


def M(ctx, order, exps, c=1):
    return TruncatedSeries.monomial(ctx, order, exps, c)


def table_from(l1, l2, a, b, K, values):
    t = ChiTable(l1, l2)
    for k in range(1, K + 1):
        for d in enum_dimvecs(l1, l2, k, a, b):
            t.set(d, values.get(d, 0), "fixture")
    return t


def test_R_pentagon():
    t = table_from(1, 1, 1, 1, 3, {D([1], [1]): 1})
    sol, f = solve_R_system(t, 1, 1, 6)
    ctx = bipartite_context(1, 1)
    assert sol.series[D([1], [1])] == 1 + M(ctx, 6, (1, 1))
    assert f == 1 + M(ctx, 6, (1, 1))


def test_R_k22_central():
    units = {D([1, 0], [1, 0]): 1, D([1, 0], [0, 1]): 1, D([0, 1], [1, 0]): 1, D([0, 1], [0, 1]): 1}
    t = table_from(2, 2, 1, 1, 4, units)
    sol, f = solve_R_system(t, 1, 1, 8)
    ctx = bipartite_context(2, 2)
    R11 = (1 + M(ctx, 8, (1, 0, 1, 0))) * (1 - M(ctx, 8, (1, 1, 1, 1))).inverse()
    assert sol.series[D([1, 0], [1, 0])] == R11
    assert f == fixtures.expanded_walls("k22_central", 8)[(1, 1)]


def test_R_k14_slope_12(scat):
    f = scat(1, 4, 9).wall_function(1, 2)
    table = extract_chi(f, 1, 2)
    sol, g = solve_R_system(table, 1, 2, 9)
    ctx = bipartite_context(1, 4)
    assert sol.series[D([2], [1, 1, 1, 1])] == (1 - M(ctx, 9, (2, 1, 1, 1, 1))).inverse()
    assert g == f


def test_missing_entry():
    t = ChiTable(1, 1)
    t.set(D([1], [1]), 1, "fixture")
    with pytest.raises(MissingChiError):
        solve_R_system(t, 1, 1, 4)


def test_extract_k22(scat):
    table = extract_chi(scat(2, 2, 8).wall_function(1, 1), 1, 1)
    assert table[D([1, 0], [1, 0])] == 1
    assert table[D([1, 1], [1, 1])] == 0
    assert all(table[d] == 0 for k in (2, 3, 4) for d in enum_dimvecs(2, 2, k, 1, 1))
    assert set(table.provenance.values()) == {"extracted"}
    assert table.is_symmetric()


def test_extract_k14(scat):
    table = extract_chi(scat(1, 4, 12).wall_function(1, 2), 1, 2)
    assert table[D([2], [1, 1, 1, 1])] == -1


def test_extract_pentagon(scat):
    table = extract_chi(scat(1, 1, 8).wall_function(1, 1), 1, 1)
    assert table[D([1], [1])] == 1
    assert all(table[D([k], [k])] == 0 for k in range(2, 5))


def test_extract_rejects_corrupted_input():
    ctx = bipartite_context(1, 1)
    f = 1 + M(ctx, 4, (1, 1), Fraction(3, 2))
    with pytest.raises(ExtractionError, match="non-integral"):
        extract_chi(f, 1, 1)


@pytest.mark.parametrize(
    "l1,l2,a,b,order",
    [(1, 2, 1, 1, 8), (1, 3, 1, 2, 9), (2, 2, 1, 2, 9), (2, 2, 2, 3, 10), (2, 3, 1, 1, 8), (3, 3, 1, 1, 8), (3, 3, 1, 2, 6)],
)
def test_round_trip_from_factorization(scat, l1, l2, a, b, order):
    f = scat(l1, l2, order).wall_function(a, b)
    table = extract_chi(f, a, b)
    K = order // (a + b)
    _, g = solve_R_system(table, a, b, K * (a + b))
    assert g == f.truncate(K * (a + b))
    # diagonal consistency with the single specialized equation
    agg = [table.aggregated(a, b, k) for k in range(1, K + 1)]
    spec = solve_specialized(agg, a, b, E_value(l1, l2, a, b), K)
    assert spec == g.specialize_diagonal(a, b)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=9, max_size=9))
def test_round_trip_from_table(values):
    dims = [d for k in (1, 2) for d in enum_dimvecs(1, 2, k, 1, 1)]
    t = ChiTable(1, 2)
    for d, c in zip(dims, values):
        t.set(d, c, "fixture")
    _, f = solve_R_system(t, 1, 1, 4)
    back = extract_chi(f, 1, 1)
    assert back.values == t.values


@pytest.mark.parametrize("l1,l2", [(2, 2), (2, 3), (3, 3)])
def test_central_vanishing(scat, l1, l2):
    table = extract_chi(scat(l1, l2, 8).wall_function(1, 1), 1, 1)
    assert all(table[d] == 1 for d in enum_dimvecs(l1, l2, 1, 1, 1))
    assert all(table[d] == 0 for k in (2, 3, 4) for d in enum_dimvecs(l1, l2, k, 1, 1))


def test_specialized_examples():
    assert solve_specialized([4, 0, 0, 0], 1, 1, 0, 4) == [1, 4, 10, 20, 35]
    assert solve_specialized([0, 0, 0], 1, 1, Fraction(1, 3), 3) == [1, 0, 0, 0]
    f = solve_specialized([9, 0, 0, 0, 0], 1, 1, Fraction(1, 3), 5)
    assert N_from_log(f) == [closed_form_N("central", l1=3, l2=3, k=k) for k in range(1, 6)]


def test_E_value():
    assert E_value(2, 2, 1, 1) == 0
    assert E_value(3, 3, 1, 1) == Fraction(1, 3)


def test_central_system_small():
    R, f = central_system(1, 1, 6)
    ctx = bipartite_context(1, 1)
    assert R[(1, 1)] == 1 + M(ctx, 6, (1, 1))
    assert f == 1 + M(ctx, 6, (1, 1))
    _, f22 = central_system(2, 2, 8)
    assert f22 == fixtures.expanded_walls("k22_central", 8)[(1, 1)]


def test_central_system_three_three_diagonal():
    # H = (1 - u H^(l1 l2 - l1 - l2))^-1 and f = H^(l1 l2), solved by plain univariate iteration
    K = 5
    H = univariate([1], K)
    u = univariate([0, 1], K)
    for _ in range(K + 1):
        H = (1 - u * H ** 3).inverse()
    _, f = central_system(3, 3, 2 * K)
    assert f.specialize_diagonal(1, 1) == coefficients(H ** 9)


@pytest.mark.parametrize("l1,l2", [(2, 2), (2, 3), (3, 3)])
def test_central_system_matches_factorization(scat, l1, l2):
    _, f = central_system(l1, l2, 8)
    assert f == scat(l1, l2, 8).wall_function(1, 1)


def test_closed_forms():
    assert closed_form_N("central", l1=3, l2=3, k=1) == 9
    assert closed_form_N("central", l1=3, l2=3, k=2) == Fraction(63, 4)
    assert closed_form_N("dm1d", l1=3, l2=3, d=2) == 9
    with pytest.raises(UseLogRouteError):
        closed_form_N("sgw", l1=2, l2=2, a=1, b=1, chi=[4], k=1)


@pytest.mark.parametrize("l1,l2,a,b,order", [(1, 1, 1, 1, 8), (1, 3, 1, 2, 9), (2, 3, 1, 1, 8), (3, 3, 1, 1, 8), (2, 2, 2, 3, 10)])
def test_sgw_matches_log_route(scat, l1, l2, a, b, order):
    f = scat(l1, l2, order).wall_function(a, b)
    table = extract_chi(f, a, b)
    K = order // (a + b)
    chi = [table.aggregated(a, b, k) for k in range(1, K + 1)]
    N = N_from_log(f.specialize_diagonal(a, b))
    assert [closed_form_N("sgw", l1=l1, l2=l2, a=a, b=b, chi=chi, k=k) for k in range(1, K + 1)] == N


def test_bps_moebius():
    N = [closed_form_N("central", l1=3, l2=3, k=k) for k in range(1, 7)]
    bps = bps_moebius(N, 3)
    assert bps[0] == 9
    # k = 2 by hand: N[2] + N[1]/4 with the sign (-1)^(3*(1-2)) = -1 and mu(2) = -1
    assert bps[1] == Fraction(63, 4) + Fraction(9, 4) == 18
    assert all(Fraction(x).denominator == 1 and x >= 0 for x in bps)
    assert bps_moebius([0, 0, 0], 3) == [0, 0, 0]


def test_product_factorization_examples():
    assert product_factorization([1, 4, 10, 20, 35], 1) == [4, 0, 0, 0]
    d = product_factorization([1, 1, 0, 0, 0, 0], -1)
    assert d[0] == -1
    assert reassemble_product(d, -1, 5) == [1, 1, 0, 0, 0, 0]


def test_product_factorization_balanced_integral(scat):
    diag = scat(2, 2, 12).wall_function(1, 1).specialize_diagonal(1, 1)
    d = product_factorization(diag, balanced_sign(2, 1, 1))
    assert all(Fraction(x).denominator == 1 for x in d)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=6), st.sampled_from([1, -1]))
def test_product_factorization_reassembles(tail, sign):
    f = [1] + tail
    d = product_factorization(f, sign)
    assert reassemble_product(d, sign, len(tail)) == f


def test_chi_table_json_round_trip():
    t = table_from(1, 2, 1, 1, 2, {D([1], [1, 0]): 1, D([2], [1, 1]): -1})
    assert ChiTable.from_json(t.to_json()).values == t.values
