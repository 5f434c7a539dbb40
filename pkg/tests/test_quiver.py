from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tvx.quiver import (
    BipartiteQuiver,
    DimVector,
    StabilitySpec,
    antisym_form,
    enum_dimvecs,
    euler_form,
    is_theta_coprime,
    rearrangement_count,
    slope,
)

K22 = BipartiteQuiver.complete(2, 2)


def D(p1, p2):
    return DimVector(tuple(p1), tuple(p2))


def test_euler_form_examples():
    assert euler_form(K22, D([1, 0], [1, 0]), D([0, 1], [0, 1])) == -1
    assert euler_form(K22, D([1, 2], [0, 3]), D([0, 0], [0, 0])) == 0


@pytest.mark.parametrize("l1,l2", [(2, 2), (3, 3), (2, 3)])
def test_unit_pair_euler_form(l1, l2):
    Q = BipartiteQuiver.complete(l1, l2)

    def unit(k, l):
        return D([int(i == k) for i in range(l1)], [int(j == l) for j in range(l2)])

    for k in range(l1):
        for l in range(l2):
            for k2 in range(l1):
                for l2_ in range(l2):
                    assert euler_form(Q, unit(k, l), unit(k2, l2_)) == (k == k2) + (l == l2_) - 1


def test_euler_form_matches_partition_formula():
    Q = BipartiteQuiver.complete(2, 3)
    d, e = D([2, 1], [0, 1, 3]), D([1, 1], [2, 0, 1])
    expected = sum(a * b for a, b in zip(d.p1, e.p1)) + sum(a * b for a, b in zip(d.p2, e.p2)) - sum(
        e.p1[k] * d.p2[l] for k in range(2) for l in range(3)
    )
    assert euler_form(Q, d, e) == expected


def test_shape_mismatch():
    with pytest.raises(ValueError):
        euler_form(K22, D([1], [1]), D([1, 0], [1, 0]))


def test_slope_examples():
    K11 = BipartiteQuiver.complete(1, 1)
    assert slope(StabilitySpec.default(K11), D([1], [1])) == Fraction(1, 2)
    K13 = BipartiteQuiver.complete(1, 3)
    assert slope(StabilitySpec.default(K13), D([2], [1, 1, 1])) == Fraction(3, 5)
    with pytest.raises(ValueError):
        slope(StabilitySpec.default(K11), D([0], [0]))


def test_levelled_slope_on_ray():
    Q = BipartiteQuiver.levelled([1, 2], [1, 3])
    spec = StabilitySpec.levelled_default(Q)
    # weighted totals |G1| = 1*1 + 2*1 = 3 = 1*a, |G2| = 1*2 + 3*1 = 5 = 1*b
    assert slope(spec, D([1, 1], [2, 1])) == Fraction(5, 8)


def test_coprimality_examples():
    assert is_theta_coprime(StabilitySpec.default(BipartiteQuiver.complete(1, 3)), D([2], [1, 1, 1]))
    assert not is_theta_coprime(StabilitySpec.default(K22), D([1, 1], [1, 1]))
    assert is_theta_coprime(StabilitySpec.default(K22), D([0, 1], [0, 0]))


def test_enum_dimvecs_counts():
    assert set(enum_dimvecs(2, 2, 1, 1, 1)) == {D([1, 0], [1, 0]), D([1, 0], [0, 1]), D([0, 1], [1, 0]), D([0, 1], [0, 1])}
    assert len(enum_dimvecs(1, 3, 1, 1, 3)) == 10
    assert len(enum_dimvecs(3, 3, 1, 3, 5)) == 210


def test_rearrangement_count():
    assert rearrangement_count([1, 1, 0]) == 3
    assert rearrangement_count([2, 2, 2]) == 1
    assert rearrangement_count([3, 1, 1, 0]) == 12


def test_json_round_trip():
    Q = BipartiteQuiver.levelled([1, 2], [3])
    assert BipartiteQuiver.from_json(Q.to_json()) == Q
    d = D([1, 2], [3])
    assert DimVector.from_json(d.to_json()) == d


vec = st.lists(st.integers(0, 3), min_size=4, max_size=4)


@given(vec, vec)
def test_antisym_form_is_antisymmetric(x, y):
    d, e = D(x[:2], x[2:]), D(y[:2], y[2:])
    assert antisym_form(K22, d, e) == -antisym_form(K22, e, d)
    assert euler_form(K22, d, d) == euler_form(K22, d, d)
