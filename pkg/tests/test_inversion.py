import pytest

from fanoforge import intlin, laurent
from fanoforge import inversion as inv
from fanoforge.errors import HomogenizationFailure, NoEliminableBundle
from fanoforge.inversion import CIModel, Scaffolding
from fanoforge.laurent import parse

from examples_data import (D_F1, D_F2, D_P2XP1, D_TWO_BUNDLES, DP6_F_A0, DP6_F_A1,
                           DP6_PARTITION, DP6_WEIGHTS, L_Y1, L_Y2, Y1, Y2, f1, f2,
                           scaffolding_f1, scaffolding_f2, scaffolding_p2xp1,
                           scaffolding_two_bundles)

FLIP_Z = ((1, 0, 0), (0, 1, 0), (0, 0, -1))


def as_tuples(m):
    return tuple(tuple(r) for r in m)


@pytest.mark.parametrize("build,D,bundles", [
    (scaffolding_p2xp1, D_P2XP1, [(2, 1)]),
    (scaffolding_two_bundles, D_TWO_BUNDLES, [(2, 1), (1, 1)]),
    (scaffolding_f1, D_F1, [(2, 1, 1), (0, 1, 1)]),
    (scaffolding_f2, D_F2, [(1, 2, 0), (0, 1, 1)]),
])
def test_reconstruct_worked_examples(build, D, bundles):
    m = inv.reconstruct(build())
    assert as_tuples(m.weights) == D
    assert m.bundles == bundles
    # rays and weights are mutually orthogonal
    for k in m.rays:
        assert all(intlin.dot(row, k) == 0 for row in m.weights)


@pytest.mark.parametrize("build,f,u", [(scaffolding_f1, f1, FLIP_Z),
                                       (scaffolding_f2, f2, None)])
def test_scaffolding_expands_to_the_mirror(build, f, u):
    s = build()
    g = inv.expand_scaffolding(s) - s.constant
    if u is not None:
        g = laurent.monomial_substitute(g, u)
    assert g == f()


def test_two_bundle_example_eliminates_to_the_single_bundle_one():
    m = inv.eliminate_toric_divisor_bundle(inv.reconstruct(scaffolding_two_bundles()))
    assert m.bundles == [(2, 1)]
    assert inv.models_equivalent(m, inv.reconstruct(scaffolding_p2xp1()))


@pytest.mark.parametrize("build,Y,L", [(scaffolding_f1, Y1, L_Y1), (scaffolding_f2, Y2, L_Y2)])
def test_elimination_gives_the_threefold_ambients(build, Y, L):
    m = inv.eliminate_toric_divisor_bundle(inv.reconstruct(build()))
    assert as_tuples(m.weights) == Y
    assert m.bundles == [L]


def test_nothing_to_eliminate():
    with pytest.raises(NoEliminableBundle):
        inv.eliminate_toric_divisor_bundle(inv.reconstruct(scaffolding_p2xp1()))


def test_dp6_has_two_towers_giving_the_known_mirrors():
    m = CIModel(DP6_WEIGHTS, DP6_PARTITION)
    towers = inv.enumerate_towers(m)
    assert len(towers) == 2
    fs = [inv.laurent_from_tower(m, t)[0] for t in towers]
    assert fs == [parse(DP6_F_A0), parse(DP6_F_A1)]


def test_tower_scaffolding_round_trips_to_an_equivalent_model():
    m = CIModel(DP6_WEIGHTS, DP6_PARTITION)
    for t in inv.enumerate_towers(m):
        f, sc = inv.laurent_from_tower(m, t)
        assert inv.expand_scaffolding(sc) == f
        assert sc.constant == m.c
        assert inv.models_equivalent(inv.reconstruct(sc), m)


def test_hypersurface_free_case():
    m = CIModel(((1, 1, 1),), [(0, 1, 2)])
    assert inv.enumerate_towers(m) == [()]
    f, _ = inv.laurent_from_tower(m, ())
    assert inv.models_equivalent(CIModel(((1, 1, 1),), [(0, 1, 2)]), m)
    assert laurent.classical_period(f, 6) == laurent.classical_period(parse("x + y + 1/(x*y)"), 6)


def test_binomial_degeneration_of_p2xp1_quadric():
    m = inv.reconstruct(scaffolding_p2xp1())
    t = inv.enumerate_towers(m)[0]
    tm = CIModel(m.weights, m.partition, m.rays, tower=t)
    (lhs, rhs), = inv.binomial_degeneration(tm)
    assert lhs == (0, 0, 1, 1, 1)
    assert rhs == (2, 1, 0, 0, 0)
    # both sides have the bundle's degree
    for side in (lhs, rhs):
        assert tuple(intlin.dot(row, side) for row in m.weights) == (2, 1)


def test_binomial_degeneration_needs_a_tower():
    with pytest.raises(HomogenizationFailure):
        inv.binomial_degeneration(CIModel(D_P2XP1, [(0, 1), (2, 3, 4)]))


def test_partition_must_cover_columns():
    with pytest.raises(HomogenizationFailure):
        CIModel(DP6_WEIGHTS, [(0, 1), (2, 3)])


def test_find_basis_none_without_unimodular_subset():
    m = CIModel(((2, 2, 1),), [(0, 1), (2,)])
    assert inv.find_basis(m) is None
    assert inv.find_basis(m, within=(2,)) == (2,)


def test_ghv_mirrors_of_quadric_in_p2xp2():
    w = ((1, 1, 1, 0, 0, 0), (0, 0, 0, 1, 1, 1))
    out = inv.ghv_mirrors(w, (1, 1))
    assert out
    for f, sc, model in out:
        assert model.bundles == [(1, 1)]
        assert inv.expand_scaffolding(sc) == f
        assert laurent.newton_polytope(f).contains_interior((0, 0))
    assert len(inv.ghv_mirrors(w, (1, 1), first_only=True)) == 1


def test_json_round_trips():
    s = scaffolding_f1()
    assert Scaffolding.from_json(s.to_json()) == s
    m = inv.reconstruct(s)
    m2 = CIModel.from_json(m.to_json())
    assert as_tuples(m2.weights) == as_tuples(m.weights) and m2.partition == m.partition
