"""Sparse Laurent polynomials with exact rational coefficients."""
import ast
from fractions import Fraction
from math import gcd

from . import intlin
from .errors import NonUnimodular, VarCountMismatch, ZeroPolynomial
from .polytope import hull, slice_points  # noqa: F401

_NAMES3 = ("x", "y", "z")


def _var_names(n):
    return _NAMES3[:n] if n <= 3 else tuple(f"x{i}" for i in range(n))


def _frac(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, str):
        return Fraction(c)
    return Fraction(c)


class LaurentPolynomial:
    """Finite map from exponent tuples to nonzero Fractions.

    Treat instances as immutable values.
    """

    __slots__ = ("n_vars", "_terms", "_hash", "_newton")

    def __init__(self, n_vars, terms=None):
        self.n_vars = n_vars
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n_vars:
                raise VarCountMismatch(f"exponent {e} does not have {n_vars} entries")
            c = _frac(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        self._terms = {e: clean[e] for e in sorted(clean) if clean[e]}
        self._hash = None
        self._newton = None

    @classmethod
    def _raw(cls, n_vars, terms):
        obj = cls.__new__(cls)
        obj.n_vars = n_vars
        obj._terms = {e: terms[e] for e in sorted(terms) if terms[e]}
        obj._hash = None
        obj._newton = None
        return obj

    # -- access
    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def support(self):
        return list(self._terms)

    def coeff(self, e):
        return self._terms.get(tuple(e), Fraction(0))

    @property
    def constant_term(self):
        return self.coeff((0,) * self.n_vars)

    def is_zero(self):
        return not self._terms

    def is_monomial(self):
        return len(self._terms) == 1

    def __len__(self):
        return len(self._terms)

    def leading_term(self):
        e = max(self._terms)
        return e, self._terms[e]

    def trailing_term(self):
        e = min(self._terms)
        return e, self._terms[e]

    # -- arithmetic
    def _coerce(self, other):
        if isinstance(other, LaurentPolynomial):
            if other.n_vars != self.n_vars:
                raise VarCountMismatch(f"{self.n_vars} vs {other.n_vars} variables")
            return other
        if isinstance(other, (int, Fraction)):
            return constant(self.n_vars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPolynomial._raw(self.n_vars, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial._raw(self.n_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LaurentPolynomial._raw(self.n_vars, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPolynomial._raw(self.n_vars, out)

    __rmul__ = __mul__

    def __pow__(self, d):
        if d < 0:
            if self.is_monomial():
                (e, c), = self._terms.items()
                return monomial(tuple(d * x for x in e), Fraction(c) ** d)
            raise ValueError("negative power of a non-monomial")
        result = constant(self.n_vars, 1)
        base = self
        while d:
            if d & 1:
                result = result * base
            d >>= 1
            if d:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_monomial():
            (e, c), = other._terms.items()
            return LaurentPolynomial._raw(
                self.n_vars,
                {tuple(a - b for a, b in zip(k, e)): v / c for k, v in self._terms.items()})
        q = divide_exact(self, other)
        if q is None:
            raise ValueError("division is not exact")
        return q

    def __rtruediv__(self, other):
        return constant(self.n_vars, other) / self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = constant(self.n_vars, other)
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.n_vars == other.n_vars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n_vars, tuple(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"LaurentPolynomial({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        names = _var_names(self.n_vars)
        parts = []
        for e, c in sorted(self._terms.items(), reverse=True):
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def shift_constant(self, c):
        return self + c

    def newton_polytope(self):
        return newton_polytope(self)


def monomial(e, c=1):
    e = tuple(e)
    return LaurentPolynomial(len(e), {e: c})


def constant(n_vars, c):
    return LaurentPolynomial(n_vars, {(0,) * n_vars: c})


def gens(n):
    return tuple(monomial(tuple(1 if i == j else 0 for j in range(n))) for i in range(n))


def add(f, g):
    return f + g


def mul(f, g):
    return f * g


def pow_(f, d):
    if d < 0:
        raise ValueError("d must be nonnegative")
    return f ** d


def newton_polytope(f):
    if f.is_zero():
        raise ZeroPolynomial("the zero polynomial has no Newton polytope")
    if f._newton is None:
        f._newton = hull(f.support())
    return f._newton


def is_normalised(f):
    if f.is_zero():
        return False
    p = newton_polytope(f)
    return all(f.coeff(v) == 1 for v in p.vertices)


def is_centered(f):
    if f.is_zero():
        return False
    p = newton_polytope(f)
    zero = (0,) * f.n_vars
    return p.contains_interior(zero) and f.coeff(zero) == 0


def monomial_substitute(f, u):
    """Apply the exponent map e -> u·e to every term."""
    if abs(intlin.det(u)) != 1:
        raise NonUnimodular("substitution matrix is not unimodular")
    return LaurentPolynomial._raw(f.n_vars, {intlin.mat_vec(u, e): c for e, c in f.items()})


# --- periods ---------------------------------------------------------------

def _lcm(a, b):
    return a * b // gcd(a, b)


def classical_period(f, d_max, prune=True):
    """Constant terms of f^0 .. f^d_max as exact values (ints when integral)."""
    out = [1]
    if d_max <= 0:
        return out
    if f.is_zero():
        return out + [0] * d_max
    n = f.n_vars
    den = 1
    for c in f._terms.values():
        den = _lcm(den, c.denominator)
    ints = [(e, int(c * den)) for e, c in f.items()]
    if n == 0:
        c0 = Fraction(ints[0][1], den)
        return out + [_norm(c0 ** d) for d in range(1, d_max + 1)]
    zero = (0,) * n
    p = newton_polytope(f)
    if not p.contains(zero):
        return out + [0] * d_max
    big = max(1, max(abs(x) for e, _ in ints for x in e))
    base = 2 * d_max * big + 3
    weights = [base ** i for i in range(n)]

    def pack(e):
        return sum(x * w for x, w in zip(e, weights))

    g = [(pack(e), c) for e, c in ints]
    reach = None
    if prune and p.is_full_dimensional:
        reach = _reach_steps(p, base, n)
    cur = {0: 1}
    for j in range(1, d_max + 1):
        nxt = {}
        get = nxt.get
        for m, c in cur.items():
            for e, a in g:
                k = m + e
                nxt[k] = get(k, 0) + c * a
        if reach is not None:
            left = d_max - j
            cur = {k: v for k, v in nxt.items() if v and reach(k) <= left}
        else:
            cur = {k: v for k, v in nxt.items() if v}
        out.append(_norm(Fraction(cur.get(0, 0), den ** j)))
    return out


def _reach_steps(p, base, n):
    """Packed monomial m -> fewest further multiplications by f that can bring it back to 0.

    That is the least r >= 0 with -m in r*Newt(f), read off the facet
    inequalities <a, x> >= h of Newt(f) (h <= 0 since Newt(f) contains 0).
    """
    half = base // 2
    facets = list(p.facets)
    cache = {}
    inf = float("inf")

    def reach(k):
        r = cache.get(k)
        if r is not None:
            return r
        q = []
        x = k
        for _ in range(n):
            dgt = x % base
            if dgt > half:
                dgt -= base
            q.append(-dgt)
            x = (x - dgt) // base
        r = 0
        for a, h in facets:
            v = sum(ai * qi for ai, qi in zip(a, q))
            if h == 0:
                if v < 0:
                    r = inf
                    break
            else:
                # v >= r*h with h < 0 means r >= v/h
                r = max(r, -((-v) // h))
        cache[k] = r
        return r

    return reach


def _norm(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


def dense_period(f, d_max):
    """Constant terms of powers by plain dense convolution (no pruning, no packing)."""
    out = [Fraction(1)]
    cur = {(0,) * f.n_vars: Fraction(1)}
    for _ in range(d_max):
        nxt = {}
        for m, c in cur.items():
            for e, a in f.items():
                k = tuple(x + y for x, y in zip(m, e))
                nxt[k] = nxt.get(k, 0) + c * a
        cur = nxt
        out.append(cur.get((0,) * f.n_vars, Fraction(0)))
    return [_norm(x) for x in out]


# --- exact division ----------------------------------------------------------

def divide_exact(f, g):
    """Quotient q with f = q·g, or None when g does not divide f.

    Iterated leading-term elimination in lex order. The quotient's exponents
    are confined to the box allowed by the supports, which forces termination.
    """
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if f.is_zero():
        return LaurentPolynomial(f.n_vars, {})
    n = f.n_vars
    fs, gs = f.support(), g.support()
    lo = [min(e[i] for e in fs) - min(e[i] for e in gs) for i in range(n)]
    hi = [max(e[i] for e in fs) - max(e[i] for e in gs) for i in range(n)]
    if any(a > b for a, b in zip(lo, hi)):
        return None
    ge, gc = g.leading_term()
    gterms = list(g.items())
    rem = dict(f._terms)
    quot = {}
    while rem:
        re_ = max(rem)
        q = tuple(a - b for a, b in zip(re_, ge))
        if any(x < a or x > b for x, a, b in zip(q, lo, hi)):
            return None
        qc = rem[re_] / gc
        quot[q] = qc
        for e, c in gterms:
            k = tuple(a + b for a, b in zip(q, e))
            v = rem.get(k, 0) - qc * c
            if v:
                rem[k] = v
            else:
                rem.pop(k, None)
    return LaurentPolynomial._raw(n, quot)


def divides(g, f):
    return divide_exact(f, g) is not None


# --- slices -----------------------------------------------------------------

class SliceDecomposition:
    """f = sum_k f_k y^k in coordinates adapted to a weight w."""

    def __init__(self, weight, basis, slices):
        self.weight = tuple(weight)
        self.basis = basis
        self.slices = dict(sorted(slices.items()))
        hs = list(self.slices)
        self.a = -min(hs) if hs else 0
        self.b = max(hs) if hs else 0

    def __getitem__(self, k):
        return self.slices.get(k)

    def get(self, k, n_vars):
        s = self.slices.get(k)
        return s if s is not None else LaurentPolynomial(n_vars, {})


def slice_decompose(f, w, basis=None):
    w = tuple(int(x) for x in w)
    if len(w) != f.n_vars:
        raise VarCountMismatch("weight length does not match variable count")
    u = basis if basis is not None else intlin.complete_to_basis(w)
    uinv = intlin.inverse_unimodular(u)
    buckets = {}
    for e, c in f.items():
        y = intlin.mat_vec(uinv, e)
        buckets.setdefault(y[-1], {})[y[:-1]] = c
    slices = {k: LaurentPolynomial._raw(f.n_vars - 1, t) for k, t in buckets.items()}
    return SliceDecomposition(w, u, slices)


def from_slices(slices, basis):
    """Inverse of slice_decompose: reassemble sum_k s_k y^k in original coordinates."""
    n = len(basis)
    out = {}
    for k, s in slices.items():
        for e, c in s.items():
            full = intlin.mat_vec(basis, tuple(e) + (k,))
            out[full] = out.get(full, 0) + c
    return LaurentPolynomial._raw(n, out)


# --- I/O --------------------------------------------------------------------

def to_json(f):
    return {"vars": f.n_vars,
            "terms": [{"e": list(e), "c": str(c)} for e, c in f.items()]}


def from_json(obj):
    n = int(obj["vars"])
    terms = {}
    for t in obj["terms"]:
        e = tuple(int(x) for x in t["e"])
        terms[e] = terms.get(e, 0) + Fraction(str(t["c"]))
    f = LaurentPolynomial(n, terms)
    shift = obj.get("constant_shift")
    if shift:
        f = f + int(shift)
    return f


def parse(text, n_vars=None):
    """Parse an arithmetic expression in x, y, z (or x0, x1, ...) into a polynomial."""
    tree = ast.parse(text.replace("^", "**"), mode="eval")
    names = sorted({node.id for node in ast.walk(tree) if isinstance(node, ast.Name)})
    if n_vars is None:
        if all(nm in _NAMES3 for nm in names):
            n_vars = max([_NAMES3.index(nm) + 1 for nm in names] + [0])
        else:
            n_vars = max(int(nm[1:]) + 1 for nm in names)
    env = dict(zip(_var_names(n_vars), gens(n_vars)))

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return constant(n_vars, node.value)
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise ValueError(f"unknown variable {node.id}")
            return env[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            left = ev(node.left)
            if isinstance(node.op, ast.Pow):
                k = node.right
                sign = 1
                if isinstance(k, ast.UnaryOp) and isinstance(k.op, ast.USub):
                    sign, k = -1, k.operand
                if not (isinstance(k, ast.Constant) and isinstance(k.value, int)):
                    raise ValueError("exponents must be integer literals")
                return left ** (sign * k.value)
            right = ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if right.is_monomial() or len(right) == 1:
                    return left / right
                return left / right
        raise ValueError(f"unsupported expression: {ast.dump(node)}")

    return ev(tree)
