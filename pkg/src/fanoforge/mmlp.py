"""Rigid maximally mutable Laurent polynomials via the linear spaces L_P(S).

Each mutation (w, h) imposes linear conditions on the coefficients a_p,
p a lattice point of P: the height -k slice must lie in the image of
multiplication by h^k on polynomials supported inside that slice.
"""
import random
from fractions import Fraction
from math import gcd

from . import intlin, laurent
from .laurent import LaurentPolynomial
from .mutation import admitted_mutations, candidate_mutations, candidate_weights

TRIALS = 3
RANDOM_LO, RANDOM_HI = 1, 2 ** 31 - 1


def _nullspace(m, ncols):
    """Basis of {x : m·x = 0} over the rationals."""
    if not m:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, piv = intlin.rref(m)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(red, piv):
            v[pc] = -row[fc]
        out.append(v)
    return out


def generic_factor(m, trial):
    """Specialise the factor: vertex coefficients 1, other coefficients random.

    Randomisation is per indecomposable summand; summands with no non-vertex
    lattice points (unit segments, unimodular triangles) stay fixed.
    """
    if not m.summands:
        return m.factor
    rng = random.Random(f"{m.weight}|{m.factor}|{trial}")
    h = laurent.constant(m.factor.n_vars, 1)
    for s in m.summands:
        verts = set(s.vertices)
        terms = {}
        for e in s.lattice_points:
            terms[e] = 1 if e in verts else rng.randrange(RANDOM_LO, RANDOM_HI)
        h = h * LaurentPolynomial(s.ambient_dim, terms)
    return h


def _is_randomised(m):
    return bool(m.summands) and any(len(s.lattice_points) > len(s.vertices) for s in m.summands)


class CoefficientSystem:
    """Affine conditions on the coefficients of f with Newt(f) = P."""

    def __init__(self, p):
        self.polytope = p
        self.points = list(p.lattice_points)
        self.index = {q: i for i, q in enumerate(self.points)}
        n = len(self.points)
        rows = []
        for v in p.vertices:
            row = [0] * (n + 1)
            row[self.index[v]] = 1
            row[n] = 1
            rows.append(row)
        zero = tuple([0] * p.ambient_dim)
        if zero in self.index:
            row = [0] * (n + 1)
            row[self.index[zero]] = 1
            rows.append(row)
        self.normalisation = [tuple(r) for r in rows]
        self._cache = {}

    @property
    def n_unknowns(self):
        return len(self.points)

    def mutation_rows(self, m):
        if m in self._cache:
            return self._cache[m]
        p = self.polytope
        n = len(self.points)
        a = -min(intlin.dot(m.weight, v) for v in p.vertices)
        trials = TRIALS if _is_randomised(m) else 1
        uinv = intlin.inverse_unimodular(m.basis)
        rows = []
        for t in range(trials):
            h = generic_factor(m, t)
            power = laurent.constant(h.n_vars, 1)
            for k in range(1, a + 1):
                power = power * h
                full = [q for q in self.points if intlin.dot(m.weight, q) == -k]
                local = [intlin.mat_vec(uinv, q)[:-1] for q in full]
                pset = set(local)
                supp = list(power.support())
                e0 = supp[0]
                gpts = []
                for q in local:
                    s = tuple(x - y for x, y in zip(q, e0))
                    if all(tuple(x + y for x, y in zip(s, e)) in pset for e in supp):
                        gpts.append(s)
                gpts = sorted(set(gpts))
                # matrix of multiplication by h^k: rows slice points, columns g points
                mat = [[power.coeff(tuple(x - y for x, y in zip(q, s))) for s in gpts] for q in local]
                # left null space: l with l·mat = 0
                left = _nullspace(intlin.transpose(mat, len(gpts)) if gpts else [], len(local))
                for l in left:
                    row = [Fraction(0)] * (n + 1)
                    for coef, q in zip(l, full):
                        row[self.index[q]] += coef
                    rows.append(tuple(_integral(row)))
        self._cache[m] = rows
        return rows

    def rows_for(self, mutations):
        rows = list(self.normalisation)
        for m in mutations:
            rows.extend(self.mutation_rows(m))
        return rows


class SolutionSpace:
    def __init__(self, dimension, solution, rank, n_unknowns):
        self.dimension = dimension
        self.solution = solution
        self.rank = rank
        self.n_unknowns = n_unknowns

    def __iter__(self):
        return iter((self.dimension, self.solution))

    def __repr__(self):
        return f"SolutionSpace(dim={self.dimension}, rank={self.rank}/{self.n_unknowns})"


def _solve(system, rows):
    n = system.n_unknowns
    ech = _Echelon(n, rows)
    if not ech.consistent:
        return SolutionSpace(-1, None, ech.rank, n)
    dim = n - ech.rank
    sol = None
    if dim == 0:
        sol = LaurentPolynomial(system.polytope.ambient_dim,
                                {system.points[c]: v for c, v in ech.solution().items()})
    return SolutionSpace(dim, sol, ech.rank, n)


def solution_space(p, s, system=None):
    """Dimension of L_P(S) (-1 when empty) and its unique element when 0-dimensional."""
    system = system or CoefficientSystem(p)
    return _solve(system, system.rows_for(s))


def is_rigid_mmlp(f):
    """(verdict, certificate) for L_P(S_f) = {f}."""
    cert = {"mutations": [], "rank": None, "unknowns": None, "dimension": None, "reason": None}
    if not (laurent.is_normalised(f) and laurent.is_centered(f)):
        cert["reason"] = "not normalised and centered"
        return False, cert
    sf = admitted_mutations(f)
    cert["mutations"] = sf
    p = laurent.newton_polytope(f)
    sol = solution_space(p, sf)
    cert.update(rank=sol.rank, unknowns=sol.n_unknowns, dimension=sol.dimension)
    if sol.dimension != 0:
        cert["reason"] = f"solution space has dimension {sol.dimension}"
        return False, cert
    if sol.solution != f:
        cert["reason"] = "unique solution differs from f"
        return False, cert
    return True, cert


def _weight_order(p, weights, by_weight):
    """Weights with few factor choices first, so branching happens late."""
    def key(j):
        w = weights[j]
        a = -min(intlin.dot(w, v) for v in p.vertices)
        return (len(by_weight[j]), -a, w)
    order = sorted(range(len(weights)), key=key)
    return [weights[j] for j in order], [by_weight[j] for j in order]


class _Echelon:
    """Reduced row echelon form over Q, grown one row at a time.

    Rows are kept as primitive integer vectors (fraction-free); column n holds
    the right-hand side, so a pivot there means the system is inconsistent.
    """

    def __init__(self, n, rows=None, _pivots=None):
        self.n = n
        self.pivots = dict(_pivots) if _pivots else {}
        for r in rows or ():
            self.add(r)

    def copy(self):
        return _Echelon(self.n, _pivots=self.pivots)

    @property
    def consistent(self):
        return self.n not in self.pivots

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, row):
        row = list(row)
        for c, prow in self.pivots.items():
            x = row[c]
            if x:
                d = prow[c]
                row = _prim([d * u - x * v for u, v in zip(row, prow)])
        return row

    def add(self, row):
        row = self.reduce(row)
        lead = next((j for j, x in enumerate(row) if x), None)
        if lead is None:
            return False
        if row[lead] < 0:
            row = [-x for x in row]
        row = tuple(row)
        pivots = {}
        for c, prow in self.pivots.items():
            x = prow[lead]
            if x:
                d = row[lead]
                prow = _prim([d * u - x * v for u, v in zip(prow, row)])
                if prow[c] < 0:
                    prow = [-u for u in prow]
                prow = tuple(prow)
            pivots[c] = prow
        pivots[lead] = row
        self.pivots = pivots
        return True

    def key(self):
        return frozenset(self.pivots.values())

    def solution(self):
        out = {}
        for c, row in self.pivots.items():
            q, r = divmod(row[self.n], row[c])
            out[c] = q if r == 0 else Fraction(row[self.n], row[c])
        return out


def _prim(row):
    g = intlin.vec_gcd(row)
    return [x // g for x in row] if g > 1 else row


def _integral(row):
    den = 1
    for x in row:
        if isinstance(x, Fraction) and x.denominator != 1:
            den = den * x.denominator // gcd(den, x.denominator)
    return _prim([int(x * den) for x in row])


def _residual(ech, rows):
    """Echelon form of rows reduced modulo ech; None when adding them is inconsistent."""
    sub = _Echelon(ech.n)
    for r in rows:
        sub.add(ech.reduce(r))
    return None if ech.n in sub.pivots else sub


def _merge(ech, sub):
    out = ech.copy()
    for r in sub.pivots.values():
        out.add(r)
    return out


def find_rigid_mmlps(p):
    """Rigid MMLPs with Newton polytope p.

    Backtracks over maximal consistent choice sets: at most one factor per
    candidate weight, factors of one weight being alternatives. A factor whose
    conditions are already implied is taken without branching; a weight may be
    left out only if all its factors end up inconsistent. Branches that cannot
    reach a unique solution are cut early: every free coefficient must still be
    touched by some remaining factor, and the remaining weights must be able to
    supply enough rank.
    """
    system = CoefficientSystem(p)
    n = system.n_unknowns
    weights = candidate_weights(p)
    by_weight = [[m for m in candidate_mutations(p, [w]) if not m.is_trivial] for w in weights]
    weights, by_weight = _weight_order(p, weights, by_weight)
    found = []
    seen = set()
    visited = set()

    def status(ech, j):
        """(some factor already implied, residuals of the consistent restricting factors)."""
        implied, opts = False, []
        for m in by_weight[j]:
            sub = _residual(ech, system.mutation_rows(m))
            if sub is None:
                continue
            if sub.rank == 0:
                implied = True
            else:
                opts.append(sub)
        return implied, opts

    def dfs(i, ech, pending):
        key = (i, ech.key(), pending)
        if key in visited:
            return
        visited.add(key)
        still = []
        for j in pending:
            implied, opts = status(ech, j)
            if implied:
                return
            if opts:
                still.append(j)
        pending = tuple(still)
        if ech.rank == n:
            f = LaurentPolynomial(p.ambient_dim,
                                  {system.points[c]: v for c, v in ech.solution().items()})
            if f not in seen:
                seen.add(f)
                if is_rigid_mmlp(f)[0]:
                    found.append(f)
            return
        if i == len(by_weight):
            return
        free = set(range(n)) - set(ech.pivots)
        touched = set()
        budget = 0
        current = None
        for j in range(i, len(by_weight)):
            implied, opts = status(ech, j)
            if j == i:
                current = (implied, opts)
            if opts:
                budget += max(s.rank for s in opts)
                for s in opts:
                    for prow in s.pivots.values():
                        touched.update(c for c in free if prow[c])
        if not free <= touched or budget < len(free):
            return
        implied, opts = current
        for sub in opts:
            dfs(i + 1, _merge(ech, sub), pending)
        if implied or not opts:
            dfs(i + 1, ech, pending)
        else:
            dfs(i + 1, ech, pending + (i,))

    dfs(0, _Echelon(n, system.normalisation), ())
    return sorted(found, key=lambda f: sorted(f.items()))


def orbit_classes(fs, aut):
    remaining = list(fs)
    orbits = []
    while remaining:
        f = remaining.pop(0)
        images = {laurent.monomial_substitute(f, u) for u in aut}
        orbit = [f] + [g for g in remaining if g in images]
        remaining = [g for g in remaining if g not in images]
        orbits.append(orbit)
    return orbits


def facet_coefficients(f, p, facet_normal):
    """Coefficients of f on the lattice points of a facet, keyed by point."""
    nrm = tuple(facet_normal)
    a = -min(intlin.dot(nrm, v) for v in p.vertices)
    return {q: f.coeff(q) for q in p.lattice_points if intlin.dot(nrm, q) == -a}
