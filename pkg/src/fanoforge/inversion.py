"""Laurent inversion: scaffoldings, towers of bundles and toric complete intersections.

Column order of every model is S_0, S_1, ..., S_c. Within S_0 the basis
columns B come first, so that D = [I | -rho_B^T] and rho restricted to the
complement B' is the identity.
"""
from fractions import Fraction
from itertools import combinations, permutations, product

from . import intlin, laurent
from .errors import HomogenizationFailure, NoBasis, NoEliminableBundle
from .laurent import LaurentPolynomial
from .toric import rays_from_weights


class Term:
    """A monomial in the f-variables times a product of theta powers."""

    def __init__(self, mono, tpow):
        self.mono = tuple(int(x) for x in mono)
        self.tpow = tuple(int(x) for x in tpow)
        if any(x < 0 for x in self.tpow):
            raise HomogenizationFailure("theta powers must be nonnegative")

    def power(self, m):
        return self.tpow[m] if m < len(self.tpow) else 0

    def __eq__(self, other):
        return isinstance(other, Term) and (self.mono, self.tpow) == (other.mono, other.tpow)

    def __hash__(self):
        return hash((self.mono, self.tpow))

    def __repr__(self):
        return f"Term({self.mono}, {self.tpow})"

    def to_json(self):
        return {"mono": list(self.mono), "tpow": list(self.tpow)}


class Scaffolding:
    def __init__(self, theta, struts, constant=0):
        self.theta = [list(terms) for terms in theta]
        self.struts = list(struts)
        self.constant = constant
        if not self.struts:
            raise HomogenizationFailure("a scaffolding needs at least one strut")
        for k, terms in enumerate(self.theta):
            if not terms:
                raise HomogenizationFailure(f"theta_{k + 1} has no terms")
            for t in terms:
                if any(t.power(m) for m in range(k, len(t.tpow))):
                    raise HomogenizationFailure(f"theta_{k + 1} refers to a later theta")
        self.n_vars = len(self.struts[0].mono)

    @property
    def c(self):
        return len(self.theta)

    def to_json(self):
        return {"c": self.c, "theta": [[t.to_json() for t in ts] for ts in self.theta],
                "struts": [s.to_json() for s in self.struts], "constant": self.constant}

    @classmethod
    def from_json(cls, obj):
        theta = [[Term(t["mono"], t.get("tpow", [])) for t in ts] for ts in obj.get("theta", [])]
        struts = [Term(s["mono"], s.get("tpow", [])) for s in obj["struts"]]
        sc = cls(theta, struts, obj.get("constant", 0))
        if "c" in obj and obj["c"] != sc.c:
            raise HomogenizationFailure("declared c does not match the theta list")
        return sc

    def __eq__(self, other):
        return (isinstance(other, Scaffolding) and self.theta == other.theta
                and self.struts == other.struts and self.constant == other.constant)


def theta_polynomials(s):
    out = []
    for terms in s.theta:
        acc = laurent.constant(s.n_vars, 0)
        for t in terms:
            acc = acc + _term_value(t, out, s.n_vars)
        out.append(acc)
    return out


def _term_value(t, thetas, n):
    v = laurent.monomial(t.mono)
    for m, th in enumerate(thetas):
        p = t.power(m)
        if p:
            v = v * th ** p
    return v


def expand_scaffolding(s):
    thetas = theta_polynomials(s)
    f = laurent.constant(s.n_vars, s.constant)
    for t in s.struts:
        f = f + _term_value(t, thetas, s.n_vars)
    return f


def strut_polynomials(s):
    thetas = theta_polynomials(s)
    return [_term_value(t, thetas, s.n_vars) for t in s.struts]


# a theta specification is the list of term lists; a tower is a c x r matrix
ThetaSpec = list
TowerSpec = tuple


class CIModel:
    """Toric complete intersection: rays, weights, partition S_0..S_c and bundles."""

    def __init__(self, weights, partition, rays=None, basis=None, charts=None, tower=None):
        self.weights = intlin.as_matrix(weights)
        self.r = len(self.weights[0])
        self.rays = intlin.as_matrix(rays) if rays is not None else rays_from_weights(self.weights)
        self.partition = [tuple(p) for p in partition]
        seen = sorted(j for p in self.partition for j in p)
        if seen != list(range(self.r)):
            raise HomogenizationFailure("partition does not cover the columns exactly once")
        self.basis = tuple(basis) if basis is not None else None
        self.charts = tuple(charts) if charts is not None else None
        self.tower = intlin.as_matrix(tower) if tower is not None else None

    @property
    def c(self):
        return len(self.partition) - 1

    @property
    def rho(self):
        return len(self.weights)

    def column(self, j):
        return tuple(row[j] for row in self.weights)

    @property
    def bundles(self):
        out = []
        for part in self.partition[1:]:
            out.append(tuple(sum(self.weights[i][j] for j in part) for i in range(self.rho)))
        return out

    def to_json(self):
        return {"rays": [list(r) for r in self.rays], "weights": [list(r) for r in self.weights],
                "partition": [list(p) for p in self.partition],
                "bundles": [list(b) for b in self.bundles],
                "basis": list(self.basis) if self.basis is not None else None,
                "charts": list(self.charts) if self.charts is not None else None,
                "tower": [list(r) for r in self.tower] if self.tower is not None else None}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["weights"], obj["partition"], obj.get("rays"), obj.get("basis"),
                   obj.get("charts"), obj.get("tower"))

    def __repr__(self):
        return f"CIModel(D={self.weights}, S={self.partition}, L={self.bundles})"


def _theta_variables(s):
    """Map f-variable -> (k, position) for the non-constant theta terms; also F positions."""
    var_of = {}
    f_pos = []
    n = s.n_vars
    for k, terms in enumerate(s.theta):
        fk = None
        for pos, t in enumerate(terms):
            if not any(t.mono):
                if fk is not None:
                    raise HomogenizationFailure(f"theta_{k + 1} has two constant terms")
                fk = pos
                continue
            nz = [i for i, x in enumerate(t.mono) if x]
            if len(nz) != 1 or t.mono[nz[0]] != 1:
                raise HomogenizationFailure("theta terms must be 1 or a single variable")
            v = nz[0]
            if v in var_of:
                raise HomogenizationFailure(f"variable {v} occurs in two theta terms")
            var_of[v] = (k, pos)
        if fk is None:
            raise HomogenizationFailure(f"theta_{k + 1} has no constant term to use as chart")
        f_pos.append(fk)
    if any(v >= n for v in var_of):
        raise HomogenizationFailure("theta term uses a variable outside the polynomial ring")
    return var_of, f_pos


def reconstruct(s):
    """Toric complete intersection model determined by a scaffolding."""
    c = s.c
    n = s.n_vars
    var_of, f_pos = _theta_variables(s)
    free_vars = [v for v in range(n) if v not in var_of]
    # struts x_v * prod theta^q for a variable v outside the thetas are rays of B'
    b_prime_struts = {}
    for idx, t in enumerate(s.struts):
        nz = [i for i, x in enumerate(t.mono) if x]
        if len(nz) == 1 and t.mono[nz[0]] == 1 and nz[0] in free_vars and nz[0] not in b_prime_struts:
            b_prime_struts[nz[0]] = idx
    if set(b_prime_struts) != set(free_vars):
        raise HomogenizationFailure("some variable is neither in a theta nor a bare strut")
    basis_struts = [i for i in range(len(s.struts)) if i not in b_prime_struts.values()]
    s0_extra = sorted(b_prime_struts.items(), key=lambda kv: kv[1])

    # columns: B struts, S0 ∩ B' struts, then the theta terms of S_1..S_c in order
    columns = []
    for i in basis_struts:
        columns.append(("strut", i))
    for v, i in s0_extra:
        columns.append(("strut", i))
    for k, terms in enumerate(s.theta):
        for pos in range(len(terms)):
            columns.append(("theta", k, pos))
    r = len(columns)
    nb = len(basis_struts)
    bprime = list(range(nb, r))

    # tower matrix
    tower = [[0] * r for _ in range(c)]
    for j, col in enumerate(columns):
        if col[0] == "strut":
            t = s.struts[col[1]]
            for m in range(c):
                tower[m][j] = -t.power(m)
        else:
            _, k, pos = col
            t = s.theta[k][pos]
            for m in range(c):
                tower[m][j] = -t.power(m) if m < k else (1 if m == k else 0)

    # coordinates of N = Z^{B'}; which column carries each f-variable
    var_col = {}
    for j, col in enumerate(columns):
        if col[0] == "theta":
            _, k, pos = col
            mono = s.theta[k][pos].mono
            if any(mono):
                var_col[mono.index(1)] = j
    for v, i in s0_extra:
        var_col[v] = columns.index(("strut", i))
    f_cols = []
    for k in range(c):
        f_cols.append(columns.index(("theta", k, f_pos[k])))
    u = [[tower[i][fj] for fj in f_cols] for i in range(c)]

    rays = [[0] * r for _ in range(len(bprime))]
    row_of = {j: i for i, j in enumerate(bprime)}
    for j in bprime:
        rays[row_of[j]][j] = 1
    for j in range(nb):
        t = s.struts[columns[j][1]]
        target = [tower[i][j] - sum(tower[i][var_col[v]] * t.mono[v] for v in range(n))
                  for i in range(c)]
        fpart = intlin.solve_rational(u, target) if c else []
        if fpart is None or any(Fraction(x).denominator != 1 for x in fpart):
            raise HomogenizationFailure("non-integral homogenisation")
        for v in range(n):
            rays[row_of[var_col[v]]][j] = t.mono[v]
        for k, fj in enumerate(f_cols):
            rays[row_of[fj]][j] = int(fpart[k])
    rho_b = [[rays[i][j] for i in range(len(bprime))] for j in range(nb)]
    weights = [[1 if i == j else 0 for j in range(nb)] + [-x for x in rho_b[i]] for i in range(nb)]

    partition = [tuple(range(nb + len(s0_extra)))]
    start = nb + len(s0_extra)
    for terms in s.theta:
        partition.append(tuple(range(start, start + len(terms))))
        start += len(terms)
    return CIModel(weights, partition, rays, basis=tuple(range(nb)), charts=tuple(f_cols),
                   tower=tower)


def eliminate_toric_divisor_bundle(model):
    """Drop a bundle L_i equal to a column D_j together with that column."""
    bundles = model.bundles
    for i, li in enumerate(bundles, start=1):
        for j in range(model.r):
            if model.column(j) != li or j in model.partition[i]:
                continue
            return _eliminate(model, i, j)
    raise NoEliminableBundle("no bundle coincides with a toric divisor")


def _eliminate(model, i, j):
    keep = [x for x in range(model.r) if x != j]
    renum = {old: new for new, old in enumerate(keep)}
    parts = [list(p) for p in model.partition]
    moved = parts[i]
    home = next(k for k, p in enumerate(parts) if j in p)
    # D_j = L_i in the class group, so S_home absorbs the columns of S_i
    parts[home] = [x for x in parts[home] if x != j] + moved
    del parts[i]
    new_parts = [tuple(sorted(renum[x] for x in p)) for p in parts]
    weights = [[row[x] for x in keep] for row in model.weights]
    return CIModel(weights, new_parts)


def canonical_form(model):
    """Columns sorted by (weight column, ray column) with the partition relabelled."""
    cols = sorted(range(model.r), key=lambda j: (model.column(j), tuple(r[j] for r in model.rays)))
    pos = {old: new for new, old in enumerate(cols)}
    w = tuple(tuple(row[j] for j in cols) for row in model.weights)
    parts = [tuple(sorted(pos[j] for j in p)) for p in model.partition]
    return w, parts


def models_equivalent(a, b):
    """Same columns and bundles up to permutation and a unimodular change of class lattice."""
    if a.r != b.r or a.rho != b.rho or a.c != b.c:
        return False
    ca = [a.column(j) for j in range(a.r)]
    cb = [b.column(j) for j in range(b.r)]
    rho = a.rho
    pivot = None
    for sub in combinations(range(a.r), rho):
        if intlin.det(intlin.transpose([ca[j] for j in sub])) != 0:
            pivot = sub
            break
    if pivot is None:
        return False
    src = intlin.transpose([ca[j] for j in pivot])
    src_inv = intlin.inverse(src)
    target_cols = sorted(cb)
    target_bundles = sorted(b.bundles)
    for img in permutations(range(b.r), rho):
        dst = intlin.transpose([cb[j] for j in img])
        amat = intlin.mat_mul(dst, src_inv)
        if any(Fraction(x).denominator != 1 for row in amat for x in row):
            continue
        amat = intlin.as_matrix(amat)
        if abs(intlin.det(amat)) != 1:
            continue
        if sorted(intlin.mat_vec(amat, v) for v in ca) != target_cols:
            continue
        if sorted(intlin.mat_vec(amat, v) for v in a.bundles) == target_bundles:
            return True
    return False


def find_basis(model, within=None):
    """First subset of `within` (default S_0) whose weight columns form a Z-basis."""
    cand = model.partition[0] if within is None else within
    for sub in combinations(cand, model.rho):
        if abs(intlin.det(intlin.transpose([model.column(j) for j in sub]))) == 1:
            return sub
    return None


def enumerate_towers(model, entry_bound=6):
    """All tower matrices (c x r) compatible with the model's weights and partition.

    Row i has 1 on S_i, 0 on S_k for 0 < k < i and on the chart column (the
    first index) of each later S_k; the remaining entries lie in
    [-entry_bound, 0] and the row must be a relation among the weight columns.
    """
    c = model.c
    if c == 0:
        return [()]
    rows = []
    for i in range(1, c + 1):
        rows.append(_tower_rows(model, i, entry_bound))
        if not rows[-1]:
            return []
    return [tuple(combo) for combo in product(*rows)]


def _tower_rows(model, i, bound):
    r = model.r
    fixed = {}
    stars = list(model.partition[0])
    for k, part in enumerate(model.partition[1:], start=1):
        for pos, j in enumerate(part):
            if k == i:
                fixed[j] = 1
            elif k < i or pos == 0:
                fixed[j] = 0
            else:
                stars.append(j)
    rho = model.rho
    cols = [model.column(j) for j in range(r)]
    # solve for a maximal independent set of S_0 stars, enumerate the rest
    s0 = list(model.partition[0])
    solved = None
    for sub in combinations(s0, min(rho, len(s0))):
        m = intlin.transpose([cols[j] for j in sub])
        if len(sub) == rho and intlin.det(m) != 0:
            solved = sub
            break
    free = [j for j in stars if solved is None or j not in solved]
    out = []
    for vals in product(range(-bound, 1), repeat=len(free)):
        row = [0] * r
        for j, v in fixed.items():
            row[j] = v
        for j, v in zip(free, vals):
            row[j] = v
        acc = [sum(row[j] * cols[j][t] for j in range(r)) for t in range(rho)]
        if solved is None:
            if not any(acc):
                out.append(tuple(row))
            continue
        m = intlin.transpose([cols[j] for j in solved])
        sol = intlin.solve_rational(m, [-x for x in acc])
        if sol is None or any(Fraction(x).denominator != 1 for x in sol):
            continue
        if all(-bound <= x <= 0 for x in sol):
            for j, x in zip(solved, sol):
                row[j] = int(x)
            out.append(tuple(row))
    return sorted(set(out))


def laurent_from_tower(model, tower, f_chart=None):
    """(f, scaffolding) from a tower of bundles that contains a basis."""
    c = model.c
    tower = intlin.as_matrix(tower) if c else ()
    basis = find_basis(model)
    if basis is None:
        raise NoBasis("the S_0 columns contain no basis of the class lattice")
    charts = tuple(f_chart) if f_chart is not None else tuple(p[0] for p in model.partition[1:])
    bprime = [j for j in range(model.r) if j not in basis]
    rb = [[row[j] for j in bprime] for row in model.rays]
    rinv = intlin.inverse_unimodular(intlin.as_matrix(rb))
    coords = intlin.mat_mul(rinv, model.rays)
    # coords[i][j]: coefficient of x_{bprime[i]} in ray j
    variables = [j for j in bprime if j not in charts]
    vpos = {j: i for i, j in enumerate(variables)}
    n = len(variables)

    def mono_of(j):
        e = [0] * n
        for i, jj in enumerate(bprime):
            if jj in vpos:
                e[vpos[jj]] = coords[i][j]
        return e

    theta = []
    for k, part in enumerate(model.partition[1:]):
        terms = []
        for j in part:
            e = [0] * n
            if j not in charts:
                e[vpos[j]] = 1
            terms.append(Term(e, [-tower[m][j] for m in range(k)]))
        theta.append(terms)
    struts = [Term(mono_of(j), [-tower[m][j] for m in range(c)]) for j in model.partition[0]]
    s = Scaffolding(theta, struts, c)
    return expand_scaffolding(s), s


def binomial_degeneration(model):
    """Pairs (lhs, rhs) of exponent vectors: prod_{S_i} z = prod_{j not in S_i} z_j^(-w_ij)."""
    if model.c == 0:
        return []
    if model.tower is None:
        raise HomogenizationFailure("model carries no tower")
    out = []
    for i, part in enumerate(model.partition[1:]):
        lhs = tuple(1 if j in part else 0 for j in range(model.r))
        rhs = tuple(0 if j in part else -model.tower[i][j] for j in range(model.r))
        out.append((lhs, rhs))
    return out


def ghv_mirrors(weights, d, entry_bound=6, first_only=False):
    """Hypersurface mirrors (c = 1): for each S_1 with sum of D_j = d whose
    complement contains a basis, every tower gives a Laurent polynomial."""
    w = intlin.as_matrix(weights)
    r = len(w[0])
    rays = rays_from_weights(w)
    cols = [tuple(row[j] for row in w) for j in range(r)]
    out = []
    for size in range(1, r):
        for s1 in combinations(range(r), size):
            if tuple(sum(cols[j][t] for j in s1) for t in range(len(w))) != tuple(d):
                continue
            s0 = tuple(j for j in range(r) if j not in s1)
            model = CIModel(w, [s0, s1], rays)
            if find_basis(model) is None:
                continue
            for tower in enumerate_towers(model, entry_bound):
                f, sc = laurent_from_tower(model, tower)
                out.append((f, sc, CIModel(w, [s0, s1], rays, basis=find_basis(model),
                                           charts=(s1[0],), tower=tower)))
                if first_only:
                    return out
    return out
