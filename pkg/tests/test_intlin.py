from fractions import Fraction
from itertools import product

from hypothesis import given, settings, strategies as st

from fanoforge import intlin


def matrices(rows=(1, 4), cols=(1, 5), lo=-6, hi=6):
    return st.integers(*rows).flatmap(
        lambda r: st.integers(*cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c),
                               min_size=r, max_size=r)))


def brute_det(m):
    # Leibniz expansion, independent of the elimination code
    from itertools import permutations
    n = len(m)
    total = 0
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = 1
        for i in range(n):
            prod *= m[i][perm[i]]
        total += sign * prod
    return total


@given(st.integers(1, 4).flatmap(lambda n: st.lists(
    st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_leibniz(m):
    assert intlin.det(m) == brute_det(m)


@given(matrices())
def test_hermite_form_is_unimodular_transform(m):
    h, u = intlin.hermite_normal_form(m)
    assert abs(intlin.det(u)) == 1
    assert [list(r) for r in intlin.mat_mul(u, m)] == [list(r) for r in h]


@given(matrices())
@settings(max_examples=60)
def test_smith_form_divisibility_chain(m):
    s, u, v = intlin.smith_normal_form(m)
    assert abs(intlin.det(u)) == 1 and abs(intlin.det(v)) == 1
    assert [list(r) for r in intlin.mat_mul(intlin.mat_mul(u, m), v)] == [list(r) for r in s]
    diag = [s[i][i] for i in range(min(len(s), len(s[0])))]
    nz = [x for x in diag if x]
    assert all(x > 0 for x in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    for i, row in enumerate(s):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0


@given(matrices(rows=(1, 3), cols=(2, 6)))
def test_saturated_kernel_annihilates_and_is_saturated(m):
    ncols = len(m[0])
    k = intlin.saturated_kernel(m, ncols)
    assert len(k) == ncols - intlin.rank(m)
    for row in k:
        assert all(intlin.dot(r, row) == 0 for r in m)
    if k:
        assert set(intlin.invariant_factors(k)) <= {1}


def test_saturated_kernel_small_box_oracle():
    # every kernel vector in a box is an integer combination of the basis
    m = [[2, 4, 6, 1]]
    k = intlin.saturated_kernel(m, 4)
    for v in product(range(-3, 4), repeat=4):
        if intlin.dot(m[0], v) == 0:
            lam = intlin.solve_rational(intlin.transpose(k), list(v))
            assert lam is not None and all(Fraction(x).denominator == 1 for x in lam)


@given(st.lists(st.integers(-7, 7), min_size=2, max_size=4).filter(
    lambda w: intlin.vec_gcd(w) == 1))
def test_complete_to_basis(w):
    u = intlin.complete_to_basis(w)
    n = len(w)
    assert abs(intlin.det(u)) == 1
    cols = intlin.transpose(u)
    for c in cols[:-1]:
        assert intlin.dot(w, c) == 0
    assert intlin.dot(w, cols[-1]) == 1


@given(matrices(rows=(1, 4), cols=(1, 4)), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_solve_rational(m, b):
    b = b[:len(m)]
    x = intlin.solve_rational(m, b)
    if x is not None:
        assert [sum(Fraction(a) * y for a, y in zip(row, x)) for row in m] == b
    else:
        assert intlin.rank(m) < intlin.rank([list(r) + [c] for r, c in zip(m, b)])


def test_inverse_unimodular():
    u = [[2, 1], [1, 1]]
    assert [list(r) for r in intlin.inverse_unimodular(u)] == [[1, -1], [-1, 2]]


def test_unimodular_subsets():
    cols = [(1, 0), (0, 1), (2, 2), (1, 1)]
    assert intlin.unimodular_subsets(cols, 2) == [(0, 1), (0, 3), (1, 3)]


def test_primitive_and_gcd():
    assert intlin.vec_gcd((4, -6, 8)) == 2
    assert tuple(intlin.primitive((4, -6, 8))) == (2, -3, 4)
