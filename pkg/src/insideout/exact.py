"""Exact rational linear algebra, integer lattices and univariate polynomials.

Matrices are plain sequences of rows.  Every routine returns fresh tuples of
``Fraction`` (or ``int`` for lattice routines) and never mutates its input.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

Rational = Fraction
Matrix = Sequence[Sequence]


def frac_matrix(m: Matrix) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in m]


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), 0)


def lcm_all(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def gcd_all(values: Iterable[int]) -> int:
    return reduce(math.gcd, values, 0)


def clear_denominators(v) -> tuple[int, ...]:
    """Smallest positive integer multiple of a rational vector (not made primitive)."""
    v = [Fraction(x) for x in v]
    den = lcm_all(x.denominator for x in v)
    return tuple(int(x * den) for x in v)


def primitive(v) -> tuple[int, ...]:
    """Primitive integer vector on the same ray as ``v`` (zero stays zero)."""
    w = clear_denominators(v)
    g = gcd_all(w)
    if g == 0:
        return w
    return tuple(x // g for x in w)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# rational echelon forms


def rref(m: Matrix) -> tuple[tuple[tuple[Fraction, ...], ...], tuple[int, ...], int]:
    """Reduced row echelon form.

    Returns ``(R, pivots, rank)``; ``R`` has the shape of ``m`` with zero rows
    moved to the bottom.
    """
    a = frac_matrix(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
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
    return tuple(tuple(row) for row in a), tuple(pivots), r


def rank(m: Matrix) -> int:
    return rref(m)[2] if len(m) else 0


def nullspace(m: Matrix, cols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Basis of ``{v : m v = 0}``, one vector per free column."""
    if cols is None:
        cols = len(m[0]) if len(m) else 0
    if not len(m):
        return [tuple(Fraction(int(i == j)) for i in range(cols)) for j in range(cols)]
    r, pivots, rk = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r[i][f]
        basis.append(tuple(v))
    return basis


def solve_rational(m: Matrix, rhs) -> tuple[Fraction, ...] | None:
    """Some rational solution of ``m x = rhs`` or None if inconsistent."""
    cols = len(m[0])
    aug = [list(row) + [b] for row, b in zip(m, rhs)]
    r, pivots, rk = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for i, p in enumerate(pivots):
        x[p] = r[i][cols]
    return tuple(x)


# ---------------------------------------------------------------------------
# integer lattices


def column_hermite(a: Sequence[Sequence[int]], cols: int | None = None):
    """Column-style echelon form ``a @ u == h`` with ``u`` unimodular.

    Returns ``(h, u, r)`` where the first ``r`` columns of ``h`` are in lower
    echelon form and the remaining columns are zero, so the last
    ``cols - r`` columns of ``u`` form a basis of the integer kernel of ``a``.
    Matrices are lists of rows.
    """
    h = [list(map(int, row)) for row in a]
    n = cols if cols is not None else (len(h[0]) if h else 0)
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def combine(p, q, s, t, x, y):
        # col_p <- s*col_p + t*col_q ; col_q <- x*col_p + y*col_q
        for mat in (h, u):
            for row in mat:
                cp, cq = row[p], row[q]
                row[p] = s * cp + t * cq
                row[q] = x * cp + y * cq

    def swap(p, q):
        for mat in (h, u):
            for row in mat:
                row[p], row[q] = row[q], row[p]

    c = 0
    for i in range(len(h)):
        if c == n:
            break
        for j in range(c + 1, n):
            b = h[i][j]
            if b == 0:
                continue
            a_ = h[i][c]
            if a_ == 0:
                swap(c, j)
                continue
            g, s, t = xgcd(a_, b)
            combine(c, j, s, t, -b // g, a_ // g)
        if h[i][c] == 0:
            continue
        if h[i][c] < 0:
            for mat in (h, u):
                for row in mat:
                    row[c] = -row[c]
        c += 1
    return h, u, c


def solve_integer(a: Sequence[Sequence[int]], rhs: Sequence[int], cols: int | None = None):
    """Integer solution of ``a x = rhs`` together with an integer kernel basis.

    Returns ``(x, kernel)``; ``x`` is None when no integer solution exists.
    """
    n = cols if cols is not None else len(a[0])
    h, u, r = column_hermite(a, n)
    y = [0] * r
    k = 0
    ok = True
    for i, row in enumerate(h):
        if k < r and row[k] != 0 and all(row[j] == 0 for j in range(k + 1, r)):
            rest = rhs[i] - sum(row[j] * y[j] for j in range(k))
            if rest % row[k]:
                ok = False
                break
            y[k] = rest // row[k]
            k += 1
    kernel = [tuple(u[i][j] for i in range(n)) for j in range(r, n)]
    if not ok:
        return None, kernel
    x = tuple(sum(u[i][j] * y[j] for j in range(r)) for i in range(n))
    if any(sum(ai * xi for ai, xi in zip(row, x)) != b for row, b in zip(a, rhs)):
        return None, kernel
    return x, kernel


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row Hermite normal form; zero rows are dropped."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return []
    n = len(a[0])
    r = 0
    pivots = []
    for c in range(n):
        if r == len(a):
            break
        for i in range(r + 1, len(a)):
            if a[i][c] == 0:
                continue
            if a[r][c] == 0:
                a[r], a[i] = a[i], a[r]
                continue
            g, s, t = xgcd(a[r][c], a[i][c])
            x, y = -a[i][c] // g, a[r][c] // g
            ra, ri = a[r], a[i]
            a[r] = [s * p + t * q for p, q in zip(ra, ri)]
            a[i] = [x * p + y * q for p, q in zip(ra, ri)]
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [p - q * s for p, s in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return [tuple(row) for row in a[:r]]


def integer_lattice_basis(vectors, dim: int | None = None) -> list[tuple[int, ...]]:
    """Basis of the saturated lattice ``span(vectors) ∩ Z^d`` in Hermite form.

    The lattice is that of the rational subspace, not the one generated by
    the vectors: ``{(2, 0), (0, 2)}`` yields a basis of all of ``Z^2``.
    """
    vectors = [tuple(Fraction(x) for x in v) for v in vectors]
    if dim is None:
        if not vectors:
            raise ValueError("dimension unknown for an empty vector list")
        dim = len(vectors[0])
    if not vectors or rank(vectors) == 0:
        return []
    complement = [clear_denominators(w) for w in nullspace(vectors, dim)]
    if not complement:
        return [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    _, kernel = solve_integer(complement, [0] * len(complement), dim)
    return hermite_normal_form(kernel)


# ---------------------------------------------------------------------------
# univariate polynomials


class Polynomial:
    """Dense univariate polynomial with rational coefficients, index = degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> Polynomial:
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Polynomial([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coeffs]})"

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Polynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial(c * other for c in self.coeffs)
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.coeffs[-1]
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - dq - 1, -1, -1):
            q = rem[k + dq] / lead
            quot[k] = q
            if q:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= q * b
        return Polynomial(quot), Polynomial(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def compose_scale(self, factor) -> Polynomial:
        """The polynomial ``x -> self(factor * x)``."""
        return Polynomial(c * Fraction(factor) ** i for i, c in enumerate(self.coeffs))

    def format(self, var: str = "t", ascending: bool = False) -> str:
        """Human-readable form such as ``2/9*t^2 + 2/3*t + 1``."""
        if self.is_zero():
            return "0"
        terms = []
        order = range(len(self.coeffs)) if ascending else range(len(self.coeffs) - 1, -1, -1)
        for i in order:
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            terms.append(("-" if c < 0 else "+", body))
        sign, body = terms[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.format()


def _as_poly(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial([x])


def interpolate(points) -> Polynomial:
    """Lagrange interpolation through ``(x, y)`` pairs with distinct ``x``."""
    points = [(Fraction(x), Fraction(y)) for x, y in points]
    result = Polynomial()
    for i, (xi, yi) in enumerate(points):
        if yi == 0:
            continue
        basis = Polynomial([1])
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j != i:
                basis = basis * Polynomial([-xj, 1])
                denom *= xi - xj
        result = result + basis * (yi / denom)
    return result


def binomial_poly(shift: int, k: int) -> Polynomial:
    """The polynomial ``t -> C(t + shift, k)``."""
    p = Polynomial([1])
    for i in range(k):
        p = p * Polynomial([Fraction(shift - i), 1])
    return p * Fraction(1, math.factorial(k))
