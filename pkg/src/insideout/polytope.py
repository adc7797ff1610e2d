"""Rational polyhedra: H-representation, exact LP, vertices and full-dimensional reduction.

An :class:`HPolyhedron` stores integer constraints in a canonical form so
that equality of constraint sets is a syntactic test.  Strict inequalities
are carried as flags; LP, affine hulls and vertices act on the closure.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import lp
from .errors import EmptyPolyhedron, NoLatticeCompatibleOrigin, ParseError, UnboundedPolyhedron
from .exact import (
    clear_denominators,
    dot,
    gcd_all,
    integer_lattice_basis,
    lcm_all,
    nullspace,
    rank,
    solve_integer,
    solve_rational,
    xgcd,
)
from .lp import LPResult


def canonical_inequality(a, b, strict: bool = False):
    """Primitive integer form of ``a . x >= b`` (or ``>``); None if always true.

    An unsatisfiable constant constraint comes back as ``0 >= 1``.
    """
    row = clear_denominators(list(a) + [b])
    g = gcd_all(row)
    if g:
        row = tuple(x // g for x in row)
    a, b = row[:-1], row[-1]
    if not any(a):
        if b < 0 or (b == 0 and not strict):
            return None
        return (a, 1, False)
    return (a, b, bool(strict))


def canonical_equality(a, b):
    """Primitive integer form of ``a . x = b`` with first nonzero of ``a`` positive.

    Returns None for ``0 = 0`` and the inequality ``0 >= 1`` for ``0 = c``.
    """
    row = clear_denominators(list(a) + [b])
    g = gcd_all(row)
    if g:
        row = tuple(x // g for x in row)
    a, b = row[:-1], row[-1]
    lead = next((x for x in a if x), 0)
    if lead == 0:
        return None if b == 0 else (a, 1, False)
    if lead < 0:
        a, b = tuple(-x for x in a), -b
    return (a, b)


@dataclass(frozen=True)
class HPolyhedron:
    """``{x in R^dim : E x = e, A x >= b (or > b where strict)}`` with integer data.

    Build instances with :meth:`make` to get canonical, deduplicated and
    sorted constraints.  Dilation by ``t`` multiplies every right-hand side.
    """

    dim: int
    equalities: tuple = ()
    inequalities: tuple = ()

    @classmethod
    def make(cls, dim: int, equalities: Iterable = (), inequalities: Iterable = ()) -> HPolyhedron:
        eqs = set()
        ineqs: dict = {}
        for a, b in equalities:
            if len(a) != dim:
                raise ValueError("constraint length does not match dimension")
            c = canonical_equality(a, b)
            if c is None:
                continue
            if len(c) == 3:
                ineqs[(c[0], c[1])] = False
            else:
                eqs.add(c)
        for ineq in inequalities:
            a, b = ineq[0], ineq[1]
            strict = ineq[2] if len(ineq) > 2 else False
            if len(a) != dim:
                raise ValueError("constraint length does not match dimension")
            c = canonical_inequality(a, b, strict)
            if c is None:
                continue
            key = (c[0], c[1])
            ineqs[key] = ineqs.get(key, False) or c[2]
        return cls(
            dim,
            tuple(sorted(eqs)),
            tuple(sorted((a, b, s) for (a, b), s in ineqs.items())),
        )

    @classmethod
    def box(cls, lower, upper, strict: bool = False) -> HPolyhedron:
        d = len(lower)
        rows = []
        for i in range(d):
            e = [0] * d
            e[i] = 1
            rows.append((tuple(e), lower[i], strict))
            rows.append((tuple(-x for x in e), -upper[i], strict))
        return cls.make(d, (), rows)

    # -- derived forms ------------------------------------------------------

    def closure(self) -> HPolyhedron:
        return HPolyhedron.make(self.dim, self.equalities, [(a, b, False) for a, b, _ in self.inequalities])

    def interior(self) -> HPolyhedron:
        """Same constraints with every inequality strict."""
        return HPolyhedron.make(self.dim, self.equalities, [(a, b, True) for a, b, _ in self.inequalities])

    def with_constraints(self, equalities=(), inequalities=()) -> HPolyhedron:
        return HPolyhedron.make(
            self.dim, list(self.equalities) + list(equalities), list(self.inequalities) + list(inequalities)
        )

    def dilate(self, t) -> HPolyhedron:
        t = Fraction(t)
        return HPolyhedron.make(
            self.dim,
            [(a, b * t) for a, b in self.equalities],
            [(a, b * t, s) for a, b, s in self.inequalities],
        )

    @property
    def is_open(self) -> bool:
        return all(s for _, _, s in self.inequalities)

    @property
    def trivially_empty(self) -> bool:
        return any(not any(a) for a, _, _ in self.inequalities)

    def contains(self, x, t=1) -> bool:
        """Membership of ``x`` in the ``t``-th dilate, strictness respected."""
        for a, b in self.equalities:
            if dot(a, x) != t * b:
                return False
        for a, b, s in self.inequalities:
            v = dot(a, x) - t * b
            if v < 0 or (s and v == 0):
                return False
        return True

    def lp_rows(self):
        """Closure constraints as ``(a, b)`` pairs meaning ``a . x >= b``."""
        rows = [(a, b) for a, b, _ in self.inequalities]
        for a, b in self.equalities:
            rows.append((a, b))
            rows.append((tuple(-x for x in a), -b))
        return rows

    def canonical_key(self):
        return (self.dim, self.equalities, self.inequalities)


# ---------------------------------------------------------------------------
# linear programming


def lp_optimize(p: HPolyhedron, objective, sense: str = "max") -> LPResult:
    """Exact optimum of ``objective . x`` over the closure of ``p``."""
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    return lp.solve(p.lp_rows(), objective, p.dim, maximize=(sense == "max"))


@functools.lru_cache(maxsize=4096)
def is_feasible(p: HPolyhedron) -> bool:
    """Closure of ``p`` nonempty."""
    if p.trivially_empty:
        return False
    return lp.feasible_point(p.lp_rows(), p.dim) is not None


def is_open_nonempty(p: HPolyhedron) -> bool:
    """True when the set itself (strict constraints honoured) is nonempty.

    Maximizes a common slack ``e`` over ``a . x - e >= b`` for strict rows.
    """
    if p.trivially_empty:
        return False
    strict = [(a, b) for a, b, s in p.inequalities if s]
    if not strict:
        return is_feasible(p)
    n = p.dim
    rows = []
    for a, b, s in p.inequalities:
        rows.append((tuple(a) + ((-1,) if s else (0,)), b))
    for a, b in p.equalities:
        rows.append((tuple(a) + (0,), b))
        rows.append((tuple(-x for x in a) + (0,), -b))
    rows.append(((0,) * n + (-1,), -1))  # e <= 1 keeps the problem bounded
    res = lp.solve(rows, (0,) * n + (1,), n + 1)
    return res.optimal and res.optimum > 0


# ---------------------------------------------------------------------------
# affine hull and vertices


@functools.lru_cache(maxsize=4096)
def affine_hull(p: HPolyhedron) -> tuple[tuple, int]:
    """Every equality valid on the closure of ``p`` and the dimension of ``p``.

    Implicit equalities are the inequalities whose maximum over the closure
    equals their right-hand side.
    """
    if not is_feasible(p):
        raise EmptyPolyhedron("polyhedron has no points")
    eqs = list(p.equalities)
    for a, b, _ in p.inequalities:
        res = lp_optimize(p, a, "max")
        if res.optimal and res.optimum == b:
            c = canonical_equality(a, b)
            if c is not None and c not in eqs:
                eqs.append(c)
    eqs.sort()
    dim = p.dim - (rank([a for a, _ in eqs]) if eqs else 0)
    return tuple(eqs), dim


def dimension(p: HPolyhedron) -> int:
    return affine_hull(p)[1]


def is_bounded(p: HPolyhedron) -> bool:
    for i in range(p.dim):
        for sign in (1, -1):
            e = [0] * p.dim
            e[i] = sign
            if lp_optimize(p, e, "max").status == lp.UNBOUNDED:
                return False
    return True


@dataclass(frozen=True)
class VPolytope:
    vertices: tuple

    @property
    def denominator(self) -> int:
        """Least common multiple of all vertex coordinate denominators."""
        return lcm_all(Fraction(x).denominator for v in self.vertices for x in v)


@functools.lru_cache(maxsize=4096)
def vertex_enumeration(p: HPolyhedron) -> VPolytope:
    """Vertices of the closure by the double description method.

    Works on the homogenized cone ``{(x, s) : a.x - b s >= 0, s >= 0}``;
    every extreme ray with ``s > 0`` is a vertex.
    """
    if not is_feasible(p):
        raise EmptyPolyhedron("polyhedron has no points")
    if not is_bounded(p):
        raise UnboundedPolyhedron("polyhedron is unbounded")
    n = p.dim + 1
    rows = [tuple(a) + (-b,) for a, b in p.lp_rows()]
    rows.append((0,) * p.dim + (1,))

    # initial simplicial cone from n independent rows
    chosen: list[int] = []
    for i, r in enumerate(rows):
        if rank([rows[j] for j in chosen] + [r]) > len(chosen):
            chosen.append(i)
            if len(chosen) == n:
                break
    basis = [rows[i] for i in chosen]
    rays = []
    for j in range(n):
        e = [0] * n
        e[j] = 1
        rays.append(_primitive(solve_rational(basis, e)))
    processed = list(chosen)

    def zero_set(ray):
        bits = 0
        for k, idx in enumerate(processed):
            if dot(rows[idx], ray) == 0:
                bits |= 1 << k
        return bits

    for idx in range(len(rows)):
        if idx in chosen:
            continue
        h = rows[idx]
        vals = [dot(h, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        if not neg:
            processed.append(idx)
            continue
        zs = [zero_set(r) for r in rays]
        new = []
        for i in pos:
            for j in neg:
                common = zs[i] & zs[j]
                if bin(common).count("1") < n - 2:
                    continue
                if any(k != i and k != j and (zs[k] & common) == common for k in range(len(rays))):
                    continue
                r = tuple(vals[i] * y - vals[j] * x for x, y in zip(rays[i], rays[j]))
                new.append(_primitive(r))
        rays = [rays[i] for i, v in enumerate(vals) if v >= 0] + new
        processed.append(idx)

    verts = set()
    for r in rays:
        if r[-1] <= 0:
            raise UnboundedPolyhedron("homogenized cone has a ray at infinity")
        verts.add(tuple(Fraction(x, r[-1]) for x in r[:-1]))
    return VPolytope(tuple(sorted(verts)))


def _primitive(v):
    w = clear_denominators(v)
    g = gcd_all(w)
    return tuple(x // g for x in w) if g else w


# ---------------------------------------------------------------------------
# lattice-preserving reduction to full dimension


@dataclass(frozen=True)
class AffineEmbedding:
    """``u -> t*offset + sum(u_i * basis_i)`` for dilations ``t`` divisible by ``modulus``.

    For each such ``t`` the map is a bijection from ``Z^k`` onto the lattice
    points of the ``t``-th dilate of the affine hull; for other ``t`` the
    dilated hull holds no lattice point at all.
    """

    offset: tuple
    basis: tuple
    modulus: int = 1
    ambient_dim: int = 0

    @property
    def reduced_dim(self) -> int:
        return len(self.basis)

    def to_ambient(self, u, t=1):
        x = [Fraction(t) * c for c in self.offset]
        for ui, b in zip(u, self.basis):
            for k, bk in enumerate(b):
                x[k] += ui * bk
        return tuple(x)

    def to_reduced(self, x, t=1):
        """Reduced coordinates of an ambient point on the dilated hull."""
        if not self.basis:
            return ()
        shifted = [Fraction(xi) - t * c for xi, c in zip(x, self.offset)]
        cols = [[b[k] for b in self.basis] for k in range(self.ambient_dim)]
        u = solve_rational(cols, shifted)
        if u is None:
            raise ValueError("point is not on the affine hull")
        return u

    def pull_back(self, a, b):
        """Row ``a . x (op) t*b`` in ambient space as ``(a', b')`` on reduced coordinates."""
        a2 = tuple(dot(a, col) for col in self.basis)
        b2 = Fraction(b) - dot(a, self.offset)
        return a2, b2

    def count_factor(self, t: int) -> int:
        return 1 if t % self.modulus == 0 else 0


def equality_embedding(equalities, dim: int) -> AffineEmbedding:
    """Dilation-compatible parametrization of ``{x : E x = t e}`` lattice points."""
    if not equalities:
        return AffineEmbedding((Fraction(0),) * dim, tuple(_unit_rows(dim)), 1, dim)
    E = [list(a) for a, _ in equalities]
    e = [b for _, b in equalities]
    # lattice of (x, s) with E x = s e; s ranges over modulus * Z
    aug = [row + [-b] for row, b in zip(E, e)]
    _, kernel = solve_integer(aug, [0] * len(aug), dim + 1)
    g, combo = 0, [0] * len(kernel)
    for i, v in enumerate(kernel):
        if v[-1] == 0:
            continue
        ng, s, t = xgcd(g, v[-1])
        combo = [s * c for c in combo]
        combo[i] = t
        g = ng
    if g == 0:
        raise NoLatticeCompatibleOrigin("no dilate of the affine hull meets the lattice")
    point = [sum(c * v[k] for c, v in zip(combo, kernel)) for k in range(dim + 1)]
    if point[-1] < 0:
        point = [-x for x in point]
    offset = tuple(Fraction(x, g) for x in point[:-1])
    basis = integer_lattice_basis(nullspace(E, dim), dim) if rank(E) < dim else []
    return AffineEmbedding(offset, tuple(basis), g, dim)


def _unit_rows(d):
    return [tuple(int(i == j) for j in range(d)) for i in range(d)]


@functools.lru_cache(maxsize=4096)
def full_dimensionalize(p: HPolyhedron) -> tuple[HPolyhedron, AffineEmbedding]:
    """Full-dimensional lattice-equivalent copy of ``p`` and the embedding back.

    For every ``t`` with ``embedding.modulus | t`` the lattice points of
    ``t*p`` are the images of the lattice points of ``t*q``; for other ``t``
    ``t*p`` holds none.  Strictness flags carry over; a strict inequality
    that is implicitly an equality makes ``q`` empty (``0 >= 1``).
    """
    eqs, _ = affine_hull(p)
    emb = equality_embedding(eqs, p.dim)
    rows = []
    for a, b, s in p.inequalities:
        a2, b2 = emb.pull_back(a, b)
        rows.append((a2, b2, s))
    q = HPolyhedron.make(emb.reduced_dim, (), rows)
    return q, emb


# ---------------------------------------------------------------------------
# text format


def parse_hrep(text: str) -> HPolyhedron:
    """Parse the plain-text H-representation format.

    First line ``d m k``; then ``m`` lines ``b a1 .. ad s`` for ``a.x >= b``
    (``s=0``) or ``a.x > b`` (``s=1``); then ``k`` lines ``b a1 .. ad`` for
    ``a.x = b``.  Blank lines and ``#`` comments are ignored.
    """
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((no, body))
    if not lines:
        raise ParseError("empty input", 1)

    def ints(no, body, count):
        try:
            vals = [int(x) for x in body.split()]
        except ValueError:
            raise ParseError(f"expected integers, got {body!r}", no) from None
        if len(vals) != count:
            raise ParseError(f"expected {count} integers, got {len(vals)}", no)
        return vals

    no, body = lines[0]
    d, m, k = ints(no, body, 3)
    if len(lines) - 1 != m + k:
        raise ParseError(f"expected {m + k} constraint lines, found {len(lines) - 1}", lines[-1][0])
    ineqs, eqs = [], []
    for no, body in lines[1:1 + m]:
        vals = ints(no, body, d + 2)
        if vals[-1] not in (0, 1):
            raise ParseError("strictness flag must be 0 or 1", no)
        ineqs.append((tuple(vals[1:-1]), vals[0], bool(vals[-1])))
    for no, body in lines[1 + m:]:
        vals = ints(no, body, d + 1)
        eqs.append((tuple(vals[1:]), vals[0]))
    return HPolyhedron.make(d, eqs, ineqs)


def format_hrep(p: HPolyhedron) -> str:
    out = [f"{p.dim} {len(p.inequalities)} {len(p.equalities)}"]
    for a, b, s in p.inequalities:
        out.append(" ".join(str(x) for x in (b, *a, int(s))))
    for a, b in p.equalities:
        out.append(" ".join(str(x) for x in (b, *a)))
    return "\n".join(out) + "\n"
