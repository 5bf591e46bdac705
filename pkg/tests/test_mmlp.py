import pytest

from fanoforge import laurent, mmlp
from fanoforge.laurent import parse
from fanoforge.mutation import admitted_mutations
from fanoforge.polytope import hull

from examples_data import F1_TEXT, f1, f2


@pytest.mark.parametrize("f", [f1(), f2()], ids=["f1", "f2"])
def test_threefold_mirrors_are_rigid(f):
    ok, cert = mmlp.is_rigid_mmlp(f)
    assert ok
    assert cert["dimension"] == 0 and cert["rank"] == cert["unknowns"]


def test_perturbed_coefficient_is_not_rigid():
    g = parse(F1_TEXT.replace("2/x", "5/x"))
    ok, cert = mmlp.is_rigid_mmlp(g)
    assert not ok
    assert cert["dimension"] >= 1


def test_non_normalised_input_is_rejected():
    ok, cert = mmlp.is_rigid_mmlp(f1() + 1)
    assert not ok and "centered" in cert["reason"]


@pytest.mark.parametrize("vertices,expected", [
    ([(1, 0), (0, 1), (-1, -1)], "x + y + 1/(x*y)"),
    ([(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)],
     "x*y + x + y + 1/x + 1/y + 1/(x*y)"),
    ([(1, 0), (0, 1), (-1, 0), (0, -1)], "x + y + 1/x + 1/y"),
])
def test_small_polygons_have_one_rigid_mmlp(vertices, expected):
    assert mmlp.find_rigid_mmlps(hull(vertices)) == [parse(expected)]


def test_edges_of_a_dilated_triangle_get_binomial_coefficients():
    fs = mmlp.find_rigid_mmlps(hull([(2, -1), (-1, 2), (-1, -1)]))
    assert len(fs) == 1
    f = fs[0]
    # an edge with four lattice points carries 1, 3, 3, 1
    assert [f.coeff(q) for q in [(2, -1), (1, 0), (0, 1), (-1, 2)]] == [1, 3, 3, 1]
    assert mmlp.is_rigid_mmlp(f)[0]


def test_solution_space_with_the_full_mutation_set_is_a_point():
    f = f1()
    sol = mmlp.solution_space(laurent.newton_polytope(f), admitted_mutations(f))
    assert sol.dimension == 0 and sol.solution == f


def test_solution_space_without_mutations_is_large():
    p = laurent.newton_polytope(f1())
    sol = mmlp.solution_space(p, [])
    assert sol.dimension == sol.n_unknowns - sol.rank > 0


def test_orbit_classes_merge_images():
    f = parse("x + y + 1/(x*y)")
    g = laurent.monomial_substitute(f, ((0, 1), (1, 0)))
    aut = [((1, 0), (0, 1)), ((0, 1), (1, 0))]
    assert len(mmlp.orbit_classes([f, g], aut)) == 1
