import pytest
from hypothesis import given, settings, strategies as st

from tvx.hn import (
    NotCoprimeError,
    euler_stable,
    gaussian_binomial,
    hn_decompositions,
    hn_decompositions_bruteforce,
    poincare,
)
from tvx.quiver import BipartiteQuiver, DimVector, StabilitySpec, euler_form, is_theta_coprime, subvectors


def D(p1, p2):
    return DimVector(tuple(p1), tuple(p2))


def default(Q):
    return StabilitySpec.default(Q)


K11 = BipartiteQuiver.complete(1, 1)
K3 = BipartiteQuiver.kronecker(3)


def test_decompositions_k11():
    decs = set(hn_decompositions(K11, default(K11), D([1], [1])))
    assert decs == {(D([1], [1]),), (D([0], [1]), D([1], [0]))}


def test_trivial_decomposition_only():
    # d = (0,1): nothing proper of higher slope
    assert list(hn_decompositions(K11, default(K11), D([0], [1]))) == [(D([0], [1]),)]


@pytest.mark.parametrize("Q,d", [(K3, D([3], [5])), (K3, D([2], [3])), (BipartiteQuiver.complete(2, 2), D([1, 1], [2, 1]))])
def test_pruned_matches_bruteforce(Q, d):
    pruned = sorted(hn_decompositions(Q, default(Q), d), key=repr)
    brute = sorted(hn_decompositions_bruteforce(Q, default(Q), d), key=repr)
    assert pruned == brute


def test_poincare_point():
    assert poincare(K11, default(K11), D([1], [1])).coeffs == (1,)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_kronecker_projective_space(m):
    # stable reps of K(m) with dimension (1,1) are points of P^(m-1)
    K = BipartiteQuiver.kronecker(m)
    assert poincare(K, default(K), D([1], [1])).coeffs == (1,) * m


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_kronecker_grassmannian(m):
    # one-dimensional sink, two-dimensional source: the source maps injectively into C^m
    K = BipartiteQuiver.kronecker(m)
    assert poincare(K, default(K), D([1], [2])).coeffs == gaussian_binomial(m, 2)
    assert poincare(K, default(K), D([2], [1])).coeffs == gaussian_binomial(m, 2)


def test_kronecker_3_5():
    for d in (D([3], [5]), D([5], [3])):
        p = poincare(K3, default(K3), d)
        assert p.at_one() == 68
        assert p.is_palindromic()
        assert p.degree == 1 - euler_form(K3, d, d) == 12


def test_k33_examples():
    Q = BipartiteQuiver.complete(3, 3)
    assert euler_stable(Q, default(Q), D([1, 1, 0], [1, 0, 0])) == 1
    assert euler_stable(Q, default(Q), D([2, 0, 0], [1, 0, 0])) == 0


def test_non_coprime_rejected():
    Q = BipartiteQuiver.complete(2, 2)
    with pytest.raises(NotCoprimeError):
        poincare(Q, default(Q), D([1, 1], [1, 1]))


def test_theta_kappa_override():
    # negating theta reverses every slope inequality; K(3) at (1,1) then has no stable points
    spec = StabilitySpec((1, 0), (1, 1))
    assert euler_stable(K3, spec, D([1], [1])) == 0


def test_levelled_stability_runs():
    Q = BipartiteQuiver.levelled([1, 2], [1])
    spec = StabilitySpec.levelled_default(Q)
    p = poincare(Q, spec, D([1, 0], [1]))
    assert p.is_palindromic()


K23 = BipartiteQuiver.complete(2, 3)
vec = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))


@settings(max_examples=40, deadline=None)
@given(vec)
def test_polynomial_properties(x):
    d = D(x[:2], x[2:])
    if d.is_zero() or not is_theta_coprime(default(K23), d):
        return
    p = poincare(K23, default(K23), d)
    assert all(c >= 0 for c in p.coeffs)
    if p.coeffs != (0,) and p.coeffs:
        assert p.is_palindromic()
        assert p.degree == 1 - euler_form(K23, d, d)


@settings(max_examples=30, deadline=None)
@given(vec)
def test_permutation_equivariance(x):
    d = D(x[:2], x[2:])
    if d.is_zero() or not is_theta_coprime(default(K23), d):
        return
    e = D(x[:2][::-1], (x[3], x[4], x[2]))
    assert euler_stable(K23, default(K23), d) == euler_stable(K23, default(K23), e)
