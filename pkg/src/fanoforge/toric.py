"""Toric varieties presented as GIT quotients C^r // (C*)^rho.

Weight data w is a rho x r integer matrix whose columns are the divisor
classes D_1..D_r. Rays are its saturated Gale dual. Column indices are
0-based throughout.
"""
from fractions import Fraction
from itertools import combinations, product
from math import gcd

from . import intlin
from .errors import InfiniteFamily, RankDeficient, StabilityOnWall, UnsupportedRank


def _columns(w):
    w = intlin.as_matrix(w)
    return tuple(zip(*w)) if w and w[0] else ()


def rays_from_weights(w):
    """Saturated Gale dual: an n x r matrix whose rows span ker(w)."""
    w = intlin.as_matrix(w)
    r = len(w[0]) if w else 0
    if intlin.rank(w) != len(w):
        raise RankDeficient("weight matrix does not have full row rank")
    return intlin.saturated_kernel(w, r)


def anticanonical(w):
    return tuple(sum(row) for row in intlin.as_matrix(w))


def _det(cols):
    return intlin.det(intlin.transpose(cols))


def _square_coords(cols, v):
    """(det, numerators) with v = sum(num_t / det * cols_t), by Cramer's rule."""
    d = _det(cols)
    nums = []
    for t in range(len(cols)):
        repl = list(cols)
        repl[t] = v
        nums.append(_det(repl))
    return d, nums


def _in_cone(cols, v, strict=False):
    """Membership of v in the cone over linearly independent cols (any count)."""
    rho = len(v)
    k = len(cols)
    if k == rho:
        d, nums = _square_coords(cols, v)
        if d < 0:
            nums = [-x for x in nums]
        return all(x > 0 for x in nums) if strict else all(x >= 0 for x in nums)
    if k == 0:
        return not any(v)
    if k == 1:
        c = cols[0]
        i = next((t for t, x in enumerate(c) if x), None)
        if i is None:
            return not any(v)
        # v = lam * c with lam = v_i / c_i
        if any(v[t] * c[i] != c[t] * v[i] for t in range(rho)):
            return False
        s = v[i] * c[i]
        return s > 0 if strict else s >= 0
    lam = intlin.solve_rational(intlin.transpose(cols), list(v))
    if lam is None:
        return False
    return all(x > 0 for x in lam) if strict else all(x >= 0 for x in lam)


def _independent(cols):
    if len(cols) == 1:
        return any(cols[0])
    return intlin.rank(intlin.transpose(cols)) == len(cols) if cols else True


class SecondaryFan:
    """Wall-and-chamber structure of the cone over the weight columns."""

    def __init__(self, w):
        self.w = intlin.as_matrix(w)
        self.rho = len(self.w)
        if self.rho > 3:
            raise UnsupportedRank(f"Picard rank {self.rho} exceeds 3")
        self.columns = _columns(self.w)
        idx = range(len(self.columns))
        self.bases = [s for s in combinations(idx, self.rho)
                      if _det([self.columns[j] for j in s]) != 0]
        self.walls = []
        for k in range(self.rho):
            for s in combinations(idx, k):
                cols = [self.columns[j] for j in s]
                if _independent(cols):
                    self.walls.append(s)

    def on_wall(self, v):
        v = tuple(v)
        return any(_in_cone([self.columns[j] for j in s], v) for s in self.walls)

    def chamber_of(self, v):
        """Frozenset of bases whose open cone contains v; None when v is on a wall or outside."""
        v = tuple(v)
        if self.on_wall(v):
            return None
        ch = frozenset(s for s in self.bases
                       if _in_cone([self.columns[j] for j in s], v, strict=True))
        return ch or None

    def in_closed_chamber(self, chamber, d):
        return all(_in_cone([self.columns[j] for j in s], tuple(d)) for s in chamber)

    def in_open_chamber(self, chamber, d):
        return all(_in_cone([self.columns[j] for j in s], tuple(d), strict=True) for s in chamber)

    def chambers(self):
        """All full-dimensional chambers, each as a frozenset of bases.

        Every chamber is a convex cone whose extremal rays are columns or
        intersections of two walls, so it contains the barycentre of some
        rho such rays.
        """
        pts = [tuple(c) for c in self.columns if any(c)]
        if self.rho == 3:
            planes = [s for s in self.walls if len(s) == 2]
            for (a, b), (c, d) in combinations(planes, 2):
                p = _plane_meet([self.columns[j] for j in (a, b)],
                                [self.columns[j] for j in (c, d)])
                if p is None:
                    continue
                for q in (p, tuple(-x for x in p)):
                    if (_in_cone([self.columns[a], self.columns[b]], q)
                            and _in_cone([self.columns[c], self.columns[d]], q)):
                        pts.append(q)
        pts = sorted(set(intlin.primitive(p) for p in pts))
        found = set()
        for combo in combinations(pts, self.rho):
            if _det(list(combo)) == 0:
                continue
            v = tuple(sum(x) for x in zip(*combo))
            ch = self.chamber_of(v)
            if ch is not None:
                found.add(ch)
        return sorted(found, key=lambda c: sorted(c))


def _plane_meet(p, q):
    """Primitive integer direction of span(p) ∩ span(q) in Z^3, or None."""
    n1 = _cross(*p)
    n2 = _cross(*q)
    d = _cross(n1, n2)
    if not any(d):
        return None
    return intlin.primitive(d)


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def chambers(w):
    return SecondaryFan(w)


def chamber_of(w, v):
    return SecondaryFan(w).chamber_of(v)


def _chamber_or_raise(fan, stability):
    ch = fan.chamber_of(stability)
    if ch is None:
        raise StabilityOnWall(f"stability {tuple(stability)} is not interior to a chamber")
    return ch


def maximal_charts(w, stability):
    fan = SecondaryFan(w)
    return sorted(_chamber_or_raise(fan, stability))


def is_nef(w, stability, d):
    fan = SecondaryFan(w)
    return fan.in_closed_chamber(_chamber_or_raise(fan, stability), d)


def is_ample(w, stability, d):
    fan = SecondaryFan(w)
    return fan.in_open_chamber(_chamber_or_raise(fan, stability), d)


def positive_functional(w, bound=50):
    """Integer y with y·D_j > 0 for every column, found by growing box search."""
    cols = _columns(w)
    rho = len(w)
    for b in range(1, bound + 1):
        for y in product(range(-b, b + 1), repeat=rho):
            if max(abs(x) for x in y) != b and b > 1:
                continue
            if all(intlin.dot(y, c) > 0 for c in cols):
                return y
    return None


def cox_monomials(w, d):
    """All nonnegative exponent vectors e with w·e = d."""
    w = intlin.as_matrix(w)
    cols = _columns(w)
    d = tuple(d)
    y = positive_functional(w)
    if y is None:
        raise InfiniteFamily("the weight columns admit no positive functional")
    budget = intlin.dot(y, d)
    if budget < 0:
        return []
    costs = [intlin.dot(y, c) for c in cols]
    r = len(cols)
    out = []
    e = [0] * r
    acc = [0] * len(d)

    def rec(j, left):
        if j == r:
            if tuple(acc) == d:
                out.append(tuple(e))
            return
        for k in range(left // costs[j] + 1):
            e[j] = k
            for i in range(len(d)):
                acc[i] += k * cols[j][i]
            rec(j + 1, left - k * costs[j])
            for i in range(len(d)):
                acc[i] -= k * cols[j][i]
        e[j] = 0

    rec(0, budget)
    return sorted(out)


def monomial_str(e):
    parts = []
    for j, k in enumerate(e):
        if k == 1:
            parts.append(f"z{j + 1}")
        elif k:
            parts.append(f"z{j + 1}^{k}")
    return "*".join(parts) or "1"


class QuotientType:
    """Cyclic quotient 1/m(a_1..a_k) on the listed coordinates, or smooth (m = 1)."""

    def __init__(self, index, weights=None, coords=(), factors=()):
        self.index = index
        self.weights = tuple(weights) if weights is not None else None
        self.coords = tuple(coords)
        self.factors = tuple(factors)

    @property
    def smooth(self):
        return self.index == 1

    def __eq__(self, other):
        return (isinstance(other, QuotientType) and self.index == other.index
                and self.weights == other.weights and self.coords == other.coords)

    def __hash__(self):
        return hash((self.index, self.weights, self.coords))

    def __repr__(self):
        if self.smooth:
            return "Smooth"
        if self.weights is None:
            return f"index {self.index}, invariant factors {self.factors}"
        coords = "".join(str(j + 1) for j in self.coords)
        return f"1/{self.index}{self.weights}_{coords}"

    def to_json(self):
        return {"index": self.index, "weights": list(self.weights) if self.weights else None,
                "coords": list(self.coords), "factors": list(self.factors)}


class Incidence:
    """Whether a generic section vanishes at a chart origin; witness monomial if not."""

    def __init__(self, passes, witness=None):
        self.passes = passes
        self.witness = witness

    def __eq__(self, other):
        return isinstance(other, Incidence) and (self.passes, self.witness) == (other.passes, other.witness)

    def __repr__(self):
        return "PassesThroughOrigin" if self.passes else f"Misses({monomial_str(self.witness)})"


class ToricModel:
    def __init__(self, w, stability):
        self.w = intlin.as_matrix(w)
        self.stability = tuple(stability)
        self.fan = SecondaryFan(self.w)
        self.chamber = _chamber_or_raise(self.fan, self.stability)
        self.rays = rays_from_weights(self.w)
        self.r = len(self.w[0])
        self.dim = self.r - len(self.w)

    @property
    def charts(self):
        return sorted(self.chamber)

    @property
    def max_cones(self):
        return [tuple(j for j in range(self.r) if j not in s) for s in self.charts]

    def ray(self, j):
        return tuple(row[j] for row in self.rays)

    def cones(self):
        """All cones of the fan as sorted index tuples (faces of the maximal cones)."""
        out = set()
        for mc in self.max_cones:
            for k in range(len(mc) + 1):
                out.update(combinations(mc, k))
        return sorted(out, key=lambda t: (len(t), t))

    def is_nef(self, d):
        return self.fan.in_closed_chamber(self.chamber, d)

    def is_ample(self, d):
        return self.fan.in_open_chamber(self.chamber, d)


def _cone_index(model, cone):
    if not cone:
        return 1, ()
    m = tuple(tuple(model.ray(j)[i] for j in cone) for i in range(model.dim))
    facs = intlin.invariant_factors(m)
    idx = 1
    for f in facs:
        idx *= f
    return idx, facs


def _normalise_weights(ws, m):
    best = None
    for u in range(1, m):
        if gcd(u, m) != 1:
            continue
        cand = tuple((u * a) % m for a in ws)
        if best is None or cand < best:
            best = cand
    return best


def chart_quotient_type(model, chart):
    """Quotient type of the chart where the coordinates in `chart` are set to 1."""
    chart = tuple(chart)
    comp = tuple(j for j in range(model.r) if j not in chart)
    idx, facs = _cone_index(model, comp)
    if idx == 1:
        return QuotientType(1, coords=comp)
    cols = _columns(model.w)
    dsig = intlin.transpose([cols[j] for j in chart])
    s, u, v = intlin.smith_normal_form(dsig)
    diag = [s[i][i] for i in range(len(s))]
    nontrivial = [i for i, x in enumerate(diag) if abs(x) > 1]
    if len(nontrivial) != 1:
        return QuotientType(idx, None, comp, facs)
    i = nontrivial[0]
    m = abs(diag[i])
    ws = [intlin.dot(u[i], cols[j]) % m for j in comp]
    return QuotientType(m, _normalise_weights(ws, m), comp, facs)


def section_chart_incidence(model, d, chart, monomials=None):
    mons = cox_monomials(model.w, d) if monomials is None else monomials
    chart = set(chart)
    for e in mons:
        if all(k == 0 or j in chart for j, k in enumerate(e)):
            return Incidence(False, e)
    return Incidence(True)


class Stratum:
    """One singular torus orbit closure and how a generic section meets it."""

    def __init__(self, cone, dim, qtype, kind, count=None, incidence=None):
        self.cone = tuple(cone)
        self.dim = dim
        self.qtype = qtype
        # kind: "point", "isolated", "misses", "non-isolated"
        self.kind = kind
        self.count = count
        self.incidence = incidence

    @property
    def points(self):
        """Number of isolated singular points of the section on this stratum."""
        if self.kind == "point":
            return 1
        if self.kind == "isolated":
            return self.count
        return 0

    def to_json(self):
        return {"cone": list(self.cone), "dim": self.dim, "index": self.qtype.index,
                "type": repr(self.qtype), "kind": self.kind, "count": self.count,
                "method": "generic-coefficient count"}

    def __repr__(self):
        return f"Stratum({self.cone}, dim={self.dim}, {self.qtype!r}, {self.kind}, {self.count})"


def _orbit_characters(model, cone, mons):
    """Integer positions of restricted monomials along the 1-dim orbit of `cone`."""
    base = mons[0]
    # T-perp in M: m with <m, rho_j> = 0 for j in cone
    a = tuple(tuple(model.ray(j)) for j in cone)
    perp = intlin.saturated_kernel(a, model.dim)
    m0 = perp[0]
    prof = tuple(intlin.dot(m0, model.ray(j)) for j in range(model.r))
    out = []
    for e in mons:
        diff = [x - y for x, y in zip(e, base)]
        j = next(i for i, x in enumerate(prof) if x)
        t = Fraction(diff[j], prof[j])
        out.append(t)
    return out


def singular_strata_report(model, d):
    """Singular orbits of the ambient space and their intersection with a generic section.

    A chart origin contributes a singular point when the section passes
    through it. A singular curve contributes as many points as a generic
    binary form restricted to it has roots on its open orbit. Singular strata
    of dimension >= 2 met by the section give non-isolated singularities.
    """
    mons = cox_monomials(model.w, d)
    report = []
    for cone in model.cones():
        if not cone:
            continue
        idx, facs = _cone_index(model, cone)
        if idx == 1:
            continue
        dim = model.dim - len(cone)
        restricted = [e for e in mons if all(e[j] == 0 for j in cone)]
        if dim == 0:
            chart = tuple(j for j in range(model.r) if j not in cone)
            qt = chart_quotient_type(model, chart)
            inc = section_chart_incidence(model, d, chart, mons)
            report.append(Stratum(cone, 0, qt, "point" if inc.passes else "misses",
                                  incidence=inc))
            continue
        qt = QuotientType(idx, None, cone, facs)
        if not restricted:
            report.append(Stratum(cone, dim, qt, "non-isolated"))
            continue
        if len(restricted) == 1:
            # a single monomial never vanishes on the open orbit
            report.append(Stratum(cone, dim, qt, "misses", count=0))
        elif dim == 1:
            ts = _orbit_characters(model, cone, restricted)
            report.append(Stratum(cone, dim, qt, "isolated", count=int(max(ts) - min(ts))))
        else:
            report.append(Stratum(cone, dim, qt, "non-isolated"))
    return report


def isolated_singularities(report):
    """(total point count, list of indices) or None when some stratum is non-isolated."""
    if any(s.kind == "non-isolated" for s in report):
        return None
    idx = []
    for s in report:
        idx.extend([s.qtype.index] * s.points)
    return len(idx), idx
