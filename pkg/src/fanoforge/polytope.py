"""Exact polytope geometry in low dimension (ambient dimension at most 4).

Polytopes are stored by their vertices. Full-dimensional polytopes also carry
their facets as (normal, height) pairs with primitive inward normals, so that
<normal, x> >= height on the polytope.
"""
from fractions import Fraction
from functools import cached_property, cmp_to_key
from itertools import combinations, product
from math import ceil, floor

from . import intlin
from .errors import (DimensionMismatch, NotFullDimensional, NotLowDimensional,
                     OriginNotInterior)

MAX_DIM = 4


def _lcm(a, b):
    from math import gcd
    return a * b // gcd(a, b)


def _cofactor_normal(diffs, n):
    # generalized cross product of n-1 vectors in dimension n
    normal = []
    for i in range(n):
        minor = [tuple(d[j] for j in range(n) if j != i) for d in diffs]
        normal.append((-1) ** i * intlin.det(minor))
    return tuple(normal)


def _full_dim_facets(pts, n):
    """Facets of the hull of integer points spanning Z^n affinely."""
    if n == 1:
        xs = [p[0] for p in pts]
        return [((1,), min(xs)), ((-1,), -max(xs))]
    facets = {}
    covered = []
    for sub in combinations(range(len(pts)), n):
        subset = set(sub)
        if any(subset <= c for c in covered):
            continue
        base = pts[sub[0]]
        diffs = [tuple(a - b for a, b in zip(pts[j], base)) for j in sub[1:]]
        normal = _cofactor_normal(diffs, n)
        if not any(normal):
            continue
        normal = intlin.primitive(normal)
        h = intlin.dot(normal, base)
        vals = [intlin.dot(normal, p) for p in pts]
        lo, hi = min(vals), max(vals)
        if lo == h:
            key = (normal, h)
        elif hi == h:
            normal = tuple(-x for x in normal)
            key = (normal, -h)
        else:
            continue
        if key not in facets:
            facets[key] = None
            covered.append({i for i, v in enumerate(vals) if v == h})
    return list(facets)


def _affine_frame(pts):
    """Affine dimension and pivot coordinates on which projection is injective."""
    base = pts[0]
    diffs = [tuple(a - b for a, b in zip(p, base)) for p in pts[1:]]
    if not diffs or not any(any(d) for d in diffs):
        return 0, []
    red, piv = intlin.rref(diffs)
    return len(piv), piv


class Polytope:
    """Convex hull of finitely many rational points."""

    def __init__(self, points):
        pts = sorted(set(tuple(p) for p in points))
        if not pts:
            raise ValueError("empty point set")
        n = len(pts[0])
        if any(len(p) != n for p in pts):
            raise DimensionMismatch("points have different lengths")
        if n > MAX_DIM:
            raise DimensionMismatch(f"ambient dimension {n} exceeds {MAX_DIM}")
        self.ambient_dim = n
        # scale to integers
        den = 1
        for p in pts:
            for x in p:
                den = _lcm(den, Fraction(x).denominator)
        ipts = [tuple(int(Fraction(x) * den) for x in p) for p in pts]
        self.dim, pivots = _affine_frame(ipts)
        if self.dim == 0:
            keep = [0]
            facets = []
        elif self.dim == n:
            facets = _full_dim_facets(ipts, n)
            keep = []
            for i, p in enumerate(ipts):
                tight = [f[0] for f in facets if intlin.dot(f[0], p) == f[1]]
                if tight and intlin.rank(tight) == n:
                    keep.append(i)
        else:
            proj = [tuple(p[c] for c in pivots) for p in ipts]
            sub = _full_dim_facets(proj, self.dim)
            keep = []
            for i, p in enumerate(proj):
                tight = [f[0] for f in sub if intlin.dot(f[0], p) == f[1]]
                if tight and intlin.rank(tight) == self.dim:
                    keep.append(i)
            facets = []
        self.vertices = tuple(pts[i] for i in keep)
        self.facets = tuple((nrm, Fraction(h, den) if den != 1 else h) for nrm, h in facets)
        if self.dim < n and self.dim > 0:
            self._pivots = pivots
        self.is_lattice = den == 1 and all(isinstance(x, int) or Fraction(x).denominator == 1
                                           for p in self.vertices for x in p)
        if self.is_lattice:
            self.vertices = tuple(tuple(int(x) for x in p) for p in self.vertices)

    def __repr__(self):
        return f"{type(self).__name__}({[list(v) for v in self.vertices]})"

    def __eq__(self, other):
        return isinstance(other, Polytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    @property
    def is_full_dimensional(self):
        return self.dim == self.ambient_dim

    def contains(self, x):
        x = tuple(x)
        if self.is_full_dimensional:
            return all(intlin.dot(nrm, x) >= h for nrm, h in self.facets)
        if self.dim == 0:
            return x == tuple(self.vertices[0])
        if not _affine_frame_same(self.vertices, x):
            return False
        proj = Polytope([tuple(v[c] for c in self._pivots) for v in self.vertices])
        return proj.contains(tuple(x[c] for c in self._pivots))

    def contains_interior(self, x):
        return self.is_full_dimensional and all(intlin.dot(nrm, x) > h for nrm, h in self.facets)

    def translate(self, t):
        return type(self)([tuple(a + b for a, b in zip(v, t)) for v in self.vertices])

    def scale(self, k):
        return type(self)([tuple(k * a for a in v) for v in self.vertices])

    def bounding_box(self):
        n = self.ambient_dim
        lo = [min(v[i] for v in self.vertices) for i in range(n)]
        hi = [max(v[i] for v in self.vertices) for i in range(n)]
        return lo, hi

    @cached_property
    def lattice_points(self):
        return tuple(_lattice_points(self))

    def interior_points(self):
        if not self.is_full_dimensional:
            raise NotFullDimensional("interior points need a full-dimensional polytope")
        return [p for p in self.lattice_points if self.contains_interior(p)]

    def facet_points(self, facet):
        nrm, h = facet
        return [p for p in self.lattice_points if intlin.dot(nrm, p) == h]


def _affine_frame_same(verts, x):
    pts = [tuple(v) for v in verts]
    d0, _ = _affine_frame(pts)
    d1, _ = _affine_frame(pts + [tuple(x)])
    return d0 == d1


class LatticePolytope(Polytope):
    pass


class RationalPolytope(Polytope):
    pass


def hull(points):
    pts = [tuple(p) for p in points]
    if not pts:
        raise ValueError("hull of an empty set")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise DimensionMismatch("points have different lengths")
    return LatticePolytope(pts)


def rational_hull(points):
    return RationalPolytope([tuple(Fraction(x) for x in p) for p in points])


def _scan_inequalities(ineqs, lo, hi):
    """Integer points of {x : <a,x> >= b} inside the box [lo, hi]."""
    n = len(lo)
    last = n - 1
    ranges = [range(ceil(lo[i]), floor(hi[i]) + 1) for i in range(last)]
    out = []
    top_lo, top_hi = ceil(lo[last]), floor(hi[last])
    for head in product(*ranges):
        a_lo, a_hi = top_lo, top_hi
        ok = True
        for nrm, h in ineqs:
            rest = h - sum(c * x for c, x in zip(nrm, head))
            c = nrm[last]
            if c > 0:
                a_lo = max(a_lo, ceil(Fraction(rest) / c))
            elif c < 0:
                a_hi = min(a_hi, floor(Fraction(rest) / c))
            elif rest > 0:
                ok = False
                break
            if a_lo > a_hi:
                ok = False
                break
        if ok:
            for z in range(a_lo, a_hi + 1):
                out.append(head + (z,))
    return out


def _lattice_points(p):
    n = p.ambient_dim
    lo, hi = p.bounding_box()
    if p.dim == n:
        return _scan_inequalities(p.facets, lo, hi)
    if p.dim == 0:
        v = p.vertices[0]
        return [tuple(int(x) for x in v)] if all(Fraction(x).denominator == 1 for x in v) else []
    piv = p._pivots
    proj = Polytope([tuple(v[c] for c in piv) for v in p.vertices])
    # affine parametrisation x = base + sum t_i d_i with d chosen so pivot coords are free
    base = p.vertices[0]
    diffs = [tuple(Fraction(a) - Fraction(b) for a, b in zip(v, base)) for v in p.vertices[1:]]
    red, pv = intlin.rref(diffs)
    out = []
    for y in _lattice_points(proj):
        t = [Fraction(y[k]) - Fraction(base[c]) for k, c in enumerate(piv)]
        x = [Fraction(b) for b in base]
        for k, row in enumerate(red):
            for j in range(n):
                x[j] += t[k] * row[j]
        if all(v.denominator == 1 for v in x):
            out.append(tuple(int(v) for v in x))
    return sorted(out)


def lattice_points(p):
    return list(p.lattice_points)


def interior_points(p):
    return p.interior_points()


def is_canonical(p):
    inner = p.interior_points()
    return inner == [tuple([0] * p.ambient_dim)]


def dual(p):
    """Polar dual {y : <y,x> >= -1 for x in p}."""
    if not p.is_full_dimensional:
        raise OriginNotInterior("dual needs a full-dimensional polytope")
    verts = []
    for nrm, h in p.facets:
        if h >= 0:
            raise OriginNotInterior("origin is not in the strict interior")
        verts.append(tuple(Fraction(c) / (-h) for c in nrm))
    return rational_hull(verts)


def ehrhart_prefix(q, k_max):
    """Lattice point counts of k*q for k = 0..k_max."""
    coeffs = [1]
    if not q.is_full_dimensional:
        for k in range(1, k_max + 1):
            coeffs.append(len(_lattice_points(q.scale(k))))
        return tuple(coeffs)
    lo, hi = q.bounding_box()
    for k in range(1, k_max + 1):
        ineqs = [(nrm, k * h) for nrm, h in q.facets]
        coeffs.append(len(_scan_inequalities(ineqs, [k * x for x in lo], [k * x for x in hi])))
    return tuple(coeffs)


def genus_from_hilbert(e):
    if len(e) < 2:
        raise ValueError("need at least two coefficients")
    return e[1] - 2


def slice_points(p, w, k, basis=None):
    """Lattice points of p at height k w.r.t. w, in slice coordinates."""
    u = basis if basis is not None else intlin.complete_to_basis(w)
    uinv = intlin.inverse_unimodular(u)
    pts = []
    for x in p.lattice_points:
        if intlin.dot(w, x) == k:
            c = intlin.mat_vec(uinv, x)
            pts.append(c[:-1])
    return pts


def slice(p, w, k, basis=None):
    """Hull of the lattice points of p at height k, or None when empty."""
    pts = slice_points(p, w, k, basis)
    if not pts:
        return None
    return hull(pts)


def minkowski_sum(a, b):
    return type(a)([tuple(x + y for x, y in zip(u, v)) for u in a.vertices for v in b.vertices])


# --- polygons -------------------------------------------------------------

def _half(v):
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def _sort_by_angle(vectors):
    def cmp(u, v):
        hu, hv = _half(u), _half(v)
        if hu != hv:
            return hu - hv
        cr = u[0] * v[1] - u[1] * v[0]
        return -1 if cr > 0 else (1 if cr < 0 else 0)
    return sorted(vectors, key=cmp_to_key(cmp))


def ccw_vertices(poly):
    """Vertices of a polygon in counterclockwise order starting from the lowest one."""
    verts = list(poly.vertices)
    if len(verts) <= 2:
        return verts
    start = min(verts, key=lambda v: (v[1], v[0]))
    others = [v for v in verts if v != start]
    dirs = _sort_by_angle([(v[0] - start[0], v[1] - start[1]) for v in others])
    return [start] + [(start[0] + d[0], start[1] + d[1]) for d in dirs]


def edge_multiplicities(poly):
    """Map primitive edge direction -> lattice length, for polytopes of ambient dim <= 2."""
    n = poly.ambient_dim
    if poly.dim == 0:
        return {}
    if n == 1:
        (a,), (b,) = poly.vertices
        return {(1,): b - a, (-1,): b - a}
    if n != 2:
        raise NotLowDimensional("edge data needs ambient dimension <= 2")
    verts = ccw_vertices(poly)
    if poly.dim == 1:
        a, b = verts
        d = (b[0] - a[0], b[1] - a[1])
        g = intlin.vec_gcd(d)
        e = (d[0] // g, d[1] // g)
        return {e: g, (-e[0], -e[1]): g}
    out = {}
    for i in range(len(verts)):
        a, b = verts[i], verts[(i + 1) % len(verts)]
        d = (b[0] - a[0], b[1] - a[1])
        g = intlin.vec_gcd(d)
        out[(d[0] // g, d[1] // g)] = g
    return out


def polygon_from_edges(edges):
    """Lattice polygon (or segment/point) from a multiset of edge vectors, placed in the positive quadrant."""
    if not edges:
        return None
    dim = len(next(iter(edges)))
    if dim == 1:
        length = edges.get((1,), 0)
        return hull([(0,), (length,)])
    pts = [(0, 0)]
    for e in _sort_by_angle([e for e, m in edges.items() if m]):
        m = edges[e]
        last = pts[-1]
        pts.append((last[0] + m * e[0], last[1] + m * e[1]))
    mx = min(p[0] for p in pts)
    my = min(p[1] for p in pts)
    return hull([(p[0] - mx, p[1] - my) for p in pts])


def normalized_translate(poly):
    lo, _ = poly.bounding_box()
    return poly.translate(tuple(-x for x in lo))


def is_minkowski_summand(a, b):
    """True when a is a Minkowski summand of b (ambient dim <= 2, up to translation)."""
    if a.dim == 0:
        return True
    ea, eb = edge_multiplicities(a), edge_multiplicities(b)
    return all(eb.get(e, 0) >= m for e, m in ea.items())


def _closing_vectors(dirs, mults):
    n = len(dirs[0])
    out = []
    for a in product(*[range(m + 1) for m in mults]):
        if not any(a):
            continue
        if all(sum(k * d[i] for k, d in zip(a, dirs)) == 0 for i in range(n)):
            out.append(a)
    return out


def summand_edge_vectors(poly):
    """All nonzero closing sub-vectors of the edge multiplicities (the summands up to translation)."""
    em = edge_multiplicities(poly)
    if not em:
        return [], []
    dirs = sorted(em)
    return dirs, _closing_vectors(dirs, [em[d] for d in dirs])


def minkowski_summand_decompositions(poly):
    """All decompositions of a polygon into lattice-indecomposable summands."""
    if poly.ambient_dim > 2 and poly.dim > 0:
        if poly.dim > 2:
            raise NotLowDimensional("Minkowski decomposition is limited to polygons")
        raise NotLowDimensional("embed the polygon in a 2-dimensional lattice first")
    dirs, closing = summand_edge_vectors(poly)
    if not dirs:
        return [[]]
    em = edge_multiplicities(poly)
    total = tuple(em[d] for d in dirs)
    closing_set = set(closing)

    def decomposable(a):
        for b in closing:
            if b != a and all(x <= y for x, y in zip(b, a)):
                rest = tuple(y - x for x, y in zip(b, a))
                if rest in closing_set:
                    return True
        return False

    atoms = sorted(a for a in closing if not decomposable(a))
    results = []

    def rec(rem, start, chosen):
        if not any(rem):
            results.append(list(chosen))
            return
        for i in range(start, len(atoms)):
            a = atoms[i]
            if all(x <= y for x, y in zip(a, rem)):
                chosen.append(a)
                rec(tuple(y - x for x, y in zip(a, rem)), i, chosen)
                chosen.pop()

    rec(total, 0, [])
    out = []
    for dec in results:
        out.append([polygon_from_edges({d: k for d, k in zip(dirs, a) if k}) for a in dec])
    return out


# --- symmetries ------------------------------------------------------------

def _vertex_signature(p, v):
    return tuple(sorted(h for nrm, h in p.facets if intlin.dot(nrm, v) == h))


def _linear_maps(p, q, first_only=False):
    """Unimodular U with U·vertices(p) = vertices(q)."""
    n = p.ambient_dim
    if len(p.vertices) != len(q.vertices):
        return []
    pv = list(p.vertices)
    basis = []
    for v in pv:
        if intlin.rank(basis + [v]) > len(basis):
            basis.append(v)
        if len(basis) == n:
            break
    if len(basis) < n:
        raise NotFullDimensional("vertices do not span the lattice")
    binv = intlin.inverse(intlin.transpose(basis))
    sig_q = {}
    for w in q.vertices:
        sig_q.setdefault(_vertex_signature(q, w), []).append(w)
    cands = [sig_q.get(_vertex_signature(p, b), []) for b in basis]
    target = set(q.vertices)
    found = []
    for imgs in product(*cands):
        if len(set(imgs)) < n:
            continue
        m = intlin.transpose(imgs)
        u = []
        ok = True
        for row in m:
            r = []
            for col in intlin.transpose(binv):
                val = sum(Fraction(a) * b for a, b in zip(row, col))
                if val.denominator != 1:
                    ok = False
                    break
                r.append(int(val))
            if not ok:
                break
            u.append(tuple(r))
        if not ok:
            continue
        u = tuple(u)
        if abs(intlin.det(u)) != 1:
            continue
        if {intlin.mat_vec(u, v) for v in pv} == target:
            found.append(u)
            if first_only:
                break
    return found


def automorphisms(p):
    if not p.is_full_dimensional:
        raise NotFullDimensional("automorphisms need a full-dimensional polytope")
    return sorted(_linear_maps(p, p))


def fingerprint(p):
    return (len(p.vertices), len(p.lattice_points), len(p.facets),
            ehrhart_prefix(dual(p), 3), tuple(sorted(h for _, h in p.facets)))


def equivalent(p, q):
    if p.ambient_dim != q.ambient_dim:
        return False
    if fingerprint(p) != fingerprint(q):
        return False
    return bool(_linear_maps(p, q, first_only=True))


def apply_linear(u, p):
    return type(p)([intlin.mat_vec(u, v) for v in p.vertices])


def from_json(obj):
    return hull([tuple(v) for v in obj["vertices"]])


def to_json(p):
    return {"vertices": [list(v) for v in p.vertices]}
