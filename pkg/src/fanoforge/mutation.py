"""Mutations x^g -> h^<w,g> x^g: mutability, application, candidate data."""
from itertools import combinations
from math import gcd

from . import intlin, laurent
from .errors import NotMutable
from .laurent import LaurentPolynomial
from .polytope import (LatticePolytope, _scan_inequalities, dual, edge_multiplicities,
                       hull, is_minkowski_summand, minkowski_summand_decompositions,
                       polygon_from_edges, slice as poly_slice)


class MutationData:
    """A weight w together with a factor h written in w-perp slice coordinates."""

    def __init__(self, weight, factor, basis=None, summands=None):
        self.weight = tuple(int(x) for x in weight)
        if intlin.vec_gcd(self.weight) != 1:
            from .errors import NonPrimitiveWeight
            raise NonPrimitiveWeight(f"weight {self.weight} is not primitive")
        self.basis = basis if basis is not None else intlin.complete_to_basis(self.weight)
        self.factor = factor
        # indecomposable pieces of Newt(h); used for generic specialisation
        self.summands = tuple(summands) if summands is not None else None

    @property
    def is_trivial(self):
        return self.factor.is_monomial()

    def __eq__(self, other):
        return (isinstance(other, MutationData) and self.weight == other.weight
                and self.basis == other.basis and self.factor == other.factor)

    def __hash__(self):
        return hash((self.weight, self.basis, self.factor))

    def __repr__(self):
        return f"MutationData(w={self.weight}, h={self.factor})"

    def inverse(self):
        """Mutation data undoing this one: weight -w with the same factor re-embedded."""
        n = len(self.weight)
        flip = tuple(tuple(-1 if (i == j == n - 1) else (1 if i == j else 0) for j in range(n))
                     for i in range(n))
        return MutationData(tuple(-x for x in self.weight), self.factor,
                            intlin.mat_mul(self.basis, flip), self.summands)

    def to_json(self):
        return {"weight": list(self.weight), "factor": laurent.to_json(self.factor),
                "slice_basis": [list(r) for r in self.basis]}

    @classmethod
    def from_json(cls, obj):
        basis = obj.get("slice_basis")
        basis = intlin.as_matrix(basis) if basis else None
        return cls(obj["weight"], laurent.from_json(obj["factor"]), basis)


def is_mutable(f, m):
    sd = laurent.slice_decompose(f, m.weight, m.basis)
    h = m.factor
    power = laurent.constant(h.n_vars, 1)
    for k in range(1, sd.a + 1):
        power = power * h
        fk = sd[-k]
        if fk is None:
            continue
        if laurent.divide_exact(fk, power) is None:
            return False
    return True


def mutate(f, m):
    sd = laurent.slice_decompose(f, m.weight, m.basis)
    h = m.factor
    out = {}
    for k, fk in sd.slices.items():
        if k >= 0:
            out[k] = fk * h ** k
        else:
            q = laurent.divide_exact(fk, h ** (-k))
            if q is None:
                raise NotMutable(f"factor does not divide the slice at height {k}")
            out[k] = q
    return laurent.from_slices(out, sd.basis)


def lattice_diameter(points):
    best = 0
    pts = list(points)
    for p, q in combinations(pts, 2):
        best = max(best, intlin.vec_gcd([a - b for a, b in zip(p, q)]))
    return best


def candidate_weights(p):
    """Primitive w whose minimal face has dimension >= 1 and a <= its lattice diameter."""
    pts = p.lattice_points
    big = lattice_diameter(pts)
    if big == 0:
        return []
    box = dual(p).scale(big)
    lo, hi = box.bounding_box()
    ineqs = [(v, -big) for v in p.vertices]
    out = []
    for w in _scan_inequalities(ineqs, lo, hi):
        if not any(w) or intlin.vec_gcd(w) != 1:
            continue
        a = -min(intlin.dot(w, v) for v in p.vertices)
        face = [x for x in pts if intlin.dot(w, x) == -a]
        if len(face) < 2:
            continue
        if a <= lattice_diameter(face):
            out.append(tuple(w))
    return sorted(out)


def _ones(poly):
    return LaurentPolynomial(poly.ambient_dim, {e: 1 for e in poly.lattice_points})


class FactorCandidate:
    def __init__(self, newton, factors):
        self.newton = newton
        # list of (LaurentPolynomial, tuple of indecomposable summands)
        self.factors = factors

    def __repr__(self):
        return f"FactorCandidate({self.newton}, {[str(h) for h, _ in self.factors]})"


def _slice_hulls(f_or_p, w, basis):
    if isinstance(f_or_p, LaurentPolynomial):
        sd = laurent.slice_decompose(f_or_p, w, basis)
        return sd.a, {-k: (hull(sd[-k].support()) if sd[-k] is not None else None)
                      for k in range(1, sd.a + 1)}
    p = f_or_p
    a = -min(intlin.dot(w, v) for v in p.vertices)
    return a, {-k: poly_slice(p, w, -k, basis) for k in range(1, a + 1)}


def candidate_factors(f_or_p, w, basis=None):
    """Polygons Q with k·Q a summand of the height -k slice for k = 1..a, with explicit factors."""
    w = tuple(w)
    basis = basis if basis is not None else intlin.complete_to_basis(w)
    a, hulls = _slice_hulls(f_or_p, w, basis)
    if a < 1:
        return []
    bottom = hulls[-a]
    if bottom is None or bottom.dim == 0:
        return []
    em = edge_multiplicities(bottom)
    dirs = sorted(em)
    ranges = [range(em[d] // a + 1) for d in dirs]
    from itertools import product
    out = []
    for b in product(*ranges):
        if not any(b):
            continue
        dim = len(dirs[0])
        if any(sum(k * d[i] for k, d in zip(b, dirs)) for i in range(dim)):
            continue
        q = polygon_from_edges({d: k for d, k in zip(dirs, b) if k})
        ok = True
        for k in range(1, a):
            qk = hulls[-k]
            if qk is not None and not is_minkowski_summand(q.scale(k), qk):
                ok = False
                break
        if not ok:
            continue
        factors = []
        seen = set()
        for dec in minkowski_summand_decompositions(q):
            h = laurent.constant(q.ambient_dim, 1)
            for s in dec:
                h = h * _ones(s)
            if h not in seen:
                seen.add(h)
                factors.append((h, tuple(dec)))
        out.append(FactorCandidate(q, factors))
    return out


def candidate_mutations(f_or_p, weights=None):
    """Every (w, h) built from candidate_weights and candidate_factors."""
    if isinstance(f_or_p, LaurentPolynomial):
        p = laurent.newton_polytope(f_or_p)
    else:
        p = f_or_p
    weights = candidate_weights(p) if weights is None else weights
    out = []
    for w in weights:
        basis = intlin.complete_to_basis(w)
        for cand in candidate_factors(f_or_p, w, basis):
            for h, dec in cand.factors:
                out.append(MutationData(w, h, basis, dec))
    return out


def admitted_mutations(f):
    """The computable core of S_f: non-trivial candidate mutations that f admits."""
    return [m for m in candidate_mutations(f) if not m.is_trivial and is_mutable(f, m)]
