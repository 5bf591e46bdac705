"""Exact integer linear algebra.

Matrices are tuples of row tuples of Python ints. Nothing here mutates its
input; every function returns fresh values.
"""
from fractions import Fraction
from itertools import combinations
from math import gcd

from .errors import NonPrimitiveWeight, NonUnimodular


def as_matrix(rows):
    return tuple(tuple(int(x) for x in r) for r in rows)


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m, ncols=None):
    if not m:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*m))


def mat_mul(a, b):
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(a, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def vec_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive(v):
    g = vec_gcd(v)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def det(m):
    """Exact determinant via fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rref(m):
    """Reduced row echelon form over the rationals. Returns (rows, pivot_cols)."""
    a = [[Fraction(x) for x in r] for r in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a[:r], pivots


def rank(m):
    if not m:
        return 0
    return len(rref(m)[1])


def solve_rational(a, b):
    """One rational solution x of a·x = b, or None when inconsistent."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [list(a[i]) + [b[i]] for i in range(rows)]
    red, piv = rref(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for row, c in zip(red, piv):
        x[c] = row[-1]
    return x


def inverse(m):
    """Rational inverse of a square matrix (raises ValueError when singular)."""
    n = len(m)
    aug = [list(m[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ValueError("singular matrix")
    return tuple(tuple(row[n:]) for row in red)


def inverse_unimodular(m):
    if abs(det(m)) != 1:
        raise NonUnimodular("matrix is not unimodular")
    inv = inverse(m)
    return tuple(tuple(int(x) for x in r) for r in inv)


def _row_op(a, i, j, q):
    # row_i -= q * row_j
    if q:
        ai, aj = a[i], a[j]
        for k in range(len(ai)):
            ai[k] -= q * aj[k]


def hermite_normal_form(m):
    """Row Hermite normal form.

    Returns (h, u) with u unimodular and u·m = h. Pivots are positive and the
    entries above each pivot lie in [0, pivot).
    """
    a = [list(r) for r in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = [list(r) for r in identity(rows)]
    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if a[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            u[r], u[p] = u[p], u[r]
            clean = True
            for i in range(r + 1, rows):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    _row_op(a, i, r, q)
                    _row_op(u, i, r, q)
                    if a[i][c]:
                        clean = False
            if clean:
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        piv = a[r][c]
        for i in range(r):
            q = a[i][c] // piv
            _row_op(a, i, r, q)
            _row_op(u, i, r, q)
        r += 1
    return as_matrix(a), as_matrix(u)


def smith_normal_form(m):
    """Smith normal form: returns (s, u, v) with u·m·v = s and d1 | d2 | ..."""
    a = [list(r) for r in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = [list(r) for r in identity(rows)]
    v = [list(r) for r in identity(cols)]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def col_op(i, j, q):
        # col_i -= q * col_j
        if q:
            for row in a:
                row[i] -= q * row[j]
            for row in v:
                row[i] -= q * row[j]

    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return as_matrix(a), as_matrix(u), as_matrix(v)
            i, j = best
            a[t], a[i] = a[i], a[t]
            u[t], u[i] = u[i], u[t]
            swap_cols(t, j)
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                q = a[i][t] // piv
                _row_op(a, i, t, q)
                _row_op(u, i, t, q)
                dirty |= a[i][t] != 0
            for j in range(t + 1, cols):
                q = a[t][j] // piv
                col_op(j, t, q)
                dirty |= a[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if a[i][j] % piv), None)
            if bad is None:
                break
            _row_op(a, t, bad[0], -1)
            _row_op(u, t, bad[0], -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return as_matrix(a), as_matrix(u), as_matrix(v)


def invariant_factors(m):
    s = smith_normal_form(m)[0]
    return tuple(s[i][i] for i in range(min(len(s), len(s[0]) if s else 0)) if s[i][i] != 0)


def saturated_kernel(m, ncols=None):
    """Rows spanning the saturated lattice {v : m·v = 0}, in Hermite normal form."""
    if not m:
        return identity(ncols or 0)
    cols = len(m[0])
    h, u = hermite_normal_form(transpose(m))
    r = sum(1 for row in h if any(row))
    basis = u[r:]
    if not basis:
        return ()
    return hermite_normal_form(basis)[0]


def row_span_saturation(m):
    """Saturation of the row lattice of m (the double Gale dual)."""
    if not m:
        return ()
    return saturated_kernel(saturated_kernel(m), len(m[0]))


def complete_to_basis(w):
    """Unimodular U whose first n-1 columns span w-perp and whose last column pairs to 1 with w."""
    w = tuple(int(x) for x in w)
    n = len(w)
    if vec_gcd(w) != 1:
        raise NonPrimitiveWeight(f"weight {w} is not primitive")
    if w == tuple(1 if i == n - 1 else 0 for i in range(n)):
        return identity(n)
    h, u = hermite_normal_form(tuple((x,) for x in w))
    cols = list(u[1:]) + [u[0]]
    return transpose(cols)


def unimodular_subsets(columns, size):
    """Index subsets of the given size whose columns have determinant ±1."""
    out = []
    for sub in combinations(range(len(columns)), size):
        if abs(det(transpose([columns[j] for j in sub]))) == 1:
            out.append(sub)
    return out
