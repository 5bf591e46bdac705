import pytest
from hypothesis import given, settings, strategies as st

from fanoforge import laurent
from fanoforge.errors import NonPrimitiveWeight, NotMutable
from fanoforge.laurent import LaurentPolynomial, classical_period, parse
from fanoforge.mutation import (MutationData, admitted_mutations, candidate_factors,
                                candidate_weights, is_mutable, mutate)

from examples_data import f1

H = MutationData((0, 1), LaurentPolynomial(1, {(0,): 1, (1,): 1}))


@pytest.mark.parametrize("a", [0, 1, 2, 3])
def test_divisibility_example(a):
    f = parse(f"y + 1/(x*y) + {a}/y + x/y")
    assert is_mutable(f, H) == (a == 2)


def test_mutation_of_the_divisible_case():
    g = mutate(parse("y + 1/(x*y) + 2/y + x/y"), H)
    assert g == parse("y + x*y + 1/y + 1/(x*y)")


def test_not_mutable_raises():
    with pytest.raises(NotMutable):
        mutate(parse("y + 1/(x*y) + 1/y + x/y"), H)


def test_non_primitive_weight():
    with pytest.raises(NonPrimitiveWeight):
        MutationData((0, 2), LaurentPolynomial(1, {(0,): 1}))


def factor_polys():
    # one-variable factors with at least two terms
    return st.lists(st.integers(1, 3), min_size=2, max_size=3).map(
        lambda cs: LaurentPolynomial(1, {(i,): c for i, c in enumerate(cs)}))


def slice_polys():
    return st.dictionaries(st.tuples(st.integers(-2, 2)), st.integers(1, 3),
                           min_size=1, max_size=3).map(lambda d: LaurentPolynomial(1, d))


@given(factor_polys(), st.lists(slice_polys(), min_size=2, max_size=4), st.integers(1, 2))
@settings(max_examples=50, deadline=None)
def test_constructed_mutable_polynomials(h, gs, a):
    # f = sum g_k y^k with the negative slices divisible by h^|k|
    slices = {}
    for i, g in enumerate(gs):
        k = i - a
        slices[k] = g * h ** (-k) if k < 0 else g
    f = laurent.from_slices(slices, ((1, 0), (0, 1)))
    m = MutationData((0, 1), h)
    assert is_mutable(f, m)
    g = mutate(f, m)
    assert classical_period(g, 6) == classical_period(f, 6)
    assert mutate(g, m.inverse()) == f


def test_candidates_for_f1():
    f = f1()
    p = laurent.newton_polytope(f)
    ws = candidate_weights(p)
    assert ws and all(len(w) == 3 for w in ws)
    muts = admitted_mutations(f)
    assert muts
    for m in muts:
        assert is_mutable(f, m)
        assert classical_period(mutate(f, m), 7) == classical_period(f, 7)


def test_candidate_factors_of_a_segment_slice():
    f = parse("y + 1/(x*y) + 2/y + x/y")
    cands = candidate_factors(f, (0, 1))
    hs = [h for c in cands for h, _ in c.factors]
    assert LaurentPolynomial(1, {(0,): 1, (1,): 1}) in hs


def test_json_round_trip():
    m = admitted_mutations(f1())[0]
    assert MutationData.from_json(m.to_json()) == m
