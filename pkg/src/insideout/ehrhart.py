"""Lattice-point counting, Ehrhart quasipolynomials and inside-out counts.

Counting is exact enumeration: equalities are eliminated by a
dilation-compatible integer parametrization, and the remaining full
dimensional system is projected by Fourier-Motzkin elimination so that the
integer range of every coordinate, given the outer ones, is read off
directly.  Quasipolynomials are interpolated from such counts per residue
class of a period bound and checked on extra dilates.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .arrangement import (
    InsideOutPolytope,
    Region,
    enumerate_regions,
    reduce_iop,
)
from .errors import (
    DegenerateArrangement,
    NoLatticeCompatibleOrigin,
    UnboundedPolyhedron,
    VerificationFailure,
)
from .exact import clear_denominators, gcd_all, interpolate, rref
from .gfun import Quasipolynomial
from .polytope import (
    HPolyhedron,
    affine_hull,
    canonical_equality,
    equality_embedding,
    is_feasible,
    is_open_nonempty,
    lp_optimize,
    vertex_enumeration,
)


@dataclass(frozen=True)
class CountFunctionSample:
    t: int
    count: int


# ---------------------------------------------------------------------------
# Fourier-Motzkin counter


def _normalize(row):
    a, b, s = row
    g = gcd_all(list(a) + [b])
    if g > 1:
        a = tuple(x // g for x in a)
        b //= g
    return a, b, s


def _tighten(rows):
    """Keep the tightest right-hand side per normal (dilations are positive)."""
    best: dict = {}
    for a, b, s in rows:
        cur = best.get(a)
        if cur is None or b > cur[0] or (b == cur[0] and s and not cur[1]):
            best[a] = (b, s)
    return [(a, b, s) for a, (b, s) in sorted(best.items())]


class _Counter:
    """Counts lattice points of ``{u : a.u >= t b (or >)}`` for positive ``t``."""

    def __init__(self, rows, dim: int, order: Sequence[int]):
        self.dim = dim
        # permute coordinates so that order[0] is outermost
        rows = [(tuple(a[k] for k in order), b, s) for a, b, s in rows]
        systems = [None] * (dim + 1)
        systems[dim] = _tighten([_normalize(r) for r in rows])
        self.empty = False
        for k in range(dim - 1, -1, -1):
            cur = systems[k + 1]
            lower = [r for r in cur if r[0][k] > 0]
            upper = [r for r in cur if r[0][k] < 0]
            nxt = [r for r in cur if r[0][k] == 0]
            for pa, pb, ps in lower:
                for qa, qb, qs in upper:
                    fp, fq = -qa[k], pa[k]
                    a = tuple(fp * x + fq * y for x, y in zip(pa, qa))
                    nxt.append(_normalize((a, fp * pb + fq * qb, ps or qs)))
            systems[k] = _tighten(nxt)
        # constant rows 0 >= t*b
        for a, b, s in systems[0]:
            if b > 0 or (b == 0 and s):
                self.empty = True
        self.levels = []
        for k in range(dim):
            rows_k = [(a[k], a[:k], b, s) for a, b, s in systems[k + 1] if a[k] != 0]
            lows = [r for r in rows_k if r[0] > 0]
            highs = [r for r in rows_k if r[0] < 0]
            if not self.empty and (not lows or not highs):
                raise UnboundedPolyhedron("polyhedron is unbounded")
            self.levels.append((lows, highs))

    def count(self, t: int) -> int:
        if self.empty:
            return 0
        if self.dim == 0:
            return 1
        return self._count(0, [], t)

    def _range(self, k, prefix, t):
        lows, highs = self.levels[k]
        lo = None
        for c, a, b, s in lows:
            rhs = t * b - sum(x * y for x, y in zip(a, prefix))
            v = rhs // c + 1 if s else -((-rhs) // c)
            if lo is None or v > lo:
                lo = v
        hi = None
        for c, a, b, s in highs:
            rhs = t * b - sum(x * y for x, y in zip(a, prefix))
            c = -c
            v = -(rhs // c) - 1 if s else (-rhs) // c
            if hi is None or v < hi:
                hi = v
        return lo, hi

    def _count(self, k, prefix, t):
        lo, hi = self._range(k, prefix, t)
        if hi < lo:
            return 0
        if k == self.dim - 1:
            return hi - lo + 1
        total = 0
        prefix.append(0)
        for v in range(lo, hi + 1):
            prefix[-1] = v
            total += self._count(k + 1, prefix, t)
        prefix.pop()
        return total


def _coordinate_order(p: HPolyhedron) -> list[int]:
    """Coordinates sorted by the width of their LP range, narrowest first."""
    widths = []
    for k in range(p.dim):
        e = [0] * p.dim
        e[k] = 1
        hi = lp_optimize(p, e, "max")
        lo = lp_optimize(p, e, "min")
        if not (hi.optimal and lo.optimal):
            widths.append((math.inf, k))
        else:
            widths.append((hi.optimum - lo.optimum, k))
    return [k for _, k in sorted(widths)]


class _Reduced:
    """Equality-free counting data for a polyhedron: counts are ``[modulus | t] * counter(t)``."""

    def __init__(self, p: HPolyhedron):
        self.modulus = 1
        self.counter = None
        try:
            emb = equality_embedding(p.equalities, p.dim)
        except NoLatticeCompatibleOrigin:
            return
        rows = []
        for a, b, s in p.inequalities:
            a2, b2 = emb.pull_back(a, b)
            row = clear_denominators(list(a2) + [b2])
            rows.append((tuple(row[:-1]), row[-1], s))
        self.modulus = emb.modulus
        k = emb.reduced_dim
        q = HPolyhedron.make(k, (), rows)
        if q.trivially_empty:
            self.counter = _Counter([((0,) * k, 1, False)], k, range(k))
            return
        order = _coordinate_order(q) if is_feasible(q) else list(range(k))
        self.counter = _Counter(q.inequalities, k, order)

    def count(self, t: int) -> int:
        if self.counter is None or t % self.modulus:
            return 0
        return self.counter.count(t)


@functools.lru_cache(maxsize=8192)
def _reduced(p: HPolyhedron) -> _Reduced:
    return _Reduced(p)


def count_lattice_points(p: HPolyhedron, t: int = 1) -> int:
    """Exact number of lattice points in the ``t``-th dilate of ``p``.

    Strict inequalities exclude their boundary.  Raises
    :class:`UnboundedPolyhedron` for unbounded input.
    """
    if t < 1:
        raise ValueError("dilation must be a positive integer")
    return _reduced(p).count(t)


def sample_counts(p: HPolyhedron, ts) -> list[CountFunctionSample]:
    return [CountFunctionSample(t, count_lattice_points(p, t)) for t in ts]


# ---------------------------------------------------------------------------
# Ehrhart quasipolynomials


def period_bound(p: HPolyhedron) -> int:
    """Least common multiple of the vertex denominators of the closure."""
    return vertex_enumeration(p.closure()).denominator


def _interpolate_residue(counter, r: int, period: int, degree: int, extra: int):
    j0 = 0 if r >= 1 else 1
    ts = [r + period * (j0 + j) for j in range(degree + 1 + extra)]
    pts = [(t, counter(t)) for t in ts]
    poly = interpolate(pts[: degree + 1])
    for t, c in pts[degree + 1:]:
        if poly(t) != c:
            raise VerificationFailure(
                f"interpolated constituent {r} mod {period} predicts {poly(t)} at t={t}, counted {c}"
            )
    return poly


@functools.lru_cache(maxsize=8192)
def ehrhart_quasipolynomial(p: HPolyhedron, extra: int = 1) -> Quasipolynomial:
    """Ehrhart quasipolynomial of the closure of ``p``.

    The period is the lcm of vertex denominators, the degree the dimension;
    each constituent is interpolated from counts at ``t = r, r+P, ...`` and
    checked on ``extra`` further dilates.
    """
    closed = p.closure()
    if not is_feasible(closed):
        return Quasipolynomial.zero()
    _, dim = affine_hull(closed)
    period = period_bound(closed)
    counter = functools.partial(count_lattice_points, closed)
    cons = [_interpolate_residue(counter, r, period, dim, extra) for r in range(period)]
    return Quasipolynomial(cons)


def open_quasipolynomial(p: HPolyhedron, extra: int = 1) -> Quasipolynomial:
    """Quasipolynomial of the relative interior of ``closure(p)`` by reciprocity."""
    closed = p.closure()
    if not is_feasible(closed):
        return Quasipolynomial.zero()
    _, dim = affine_hull(closed)
    return ehrhart_quasipolynomial(closed, extra).reciprocal(dim)


def counting_quasipolynomial(p: HPolyhedron, extra: int = 1) -> Quasipolynomial:
    """Counting quasipolynomial of ``p`` honouring its strictness flags, valid for ``t >= 1``.

    Closed and open inputs go through the closure's Ehrhart quasipolynomial
    (and reciprocity); mixed inputs are interpolated from direct counts with
    the closure's period bound.
    """
    strict = [s for _, _, s in p.inequalities]
    if not any(strict):
        return ehrhart_quasipolynomial(p, extra)
    if all(strict):
        if not is_open_nonempty(p):
            return Quasipolynomial.zero()
        return open_quasipolynomial(p, extra)
    closed = p.closure()
    if not is_feasible(closed):
        return Quasipolynomial.zero()
    _, dim = affine_hull(closed)
    period = period_bound(closed)
    counter = functools.partial(count_lattice_points, p)
    return Quasipolynomial([_interpolate_residue(counter, r, period, dim, extra) for r in range(period)])


def open_count_via_reciprocity(p: HPolyhedron, t: int) -> int:
    """``(-1)^dim L(-t)`` for the closure's Ehrhart quasipolynomial ``L``."""
    v = open_quasipolynomial(p)(t)
    return int(v)


def verify_quasipolynomial(q: Quasipolynomial, count: Callable[[int], int], per_residue: int = 2) -> list[int]:
    """Compare ``q`` with ``count`` at ``per_residue`` dilates in every residue class.

    The dilates lie past the interpolation samples.  Returns the checked
    values of ``t``; raises :class:`VerificationFailure` on a mismatch.
    """
    q = q.normalized()
    period, degree = q.period, max(q.degree, 0)
    checked = []
    for r in range(period):
        for j in range(per_residue):
            t = r + period * (degree + 2 + j)
            c = count(t)
            if q(t) != c:
                raise VerificationFailure(f"quasipolynomial gives {q(t)} at t={t}, direct count is {c}")
            checked.append(t)
    return checked


# ---------------------------------------------------------------------------
# inside-out counting: region path


def region_quasipolynomial(region) -> Quasipolynomial:
    p = region.polytope if isinstance(region, Region) else region
    return open_quasipolynomial(p)


def sum_quasipolynomials(qps) -> Quasipolynomial:
    total = Quasipolynomial.zero()
    for q in qps:
        total = total + q
    return total.normalized()


def iop_count_regions(
    iop: InsideOutPolytope,
    regions: Sequence[Region] | None = None,
    split_depth: int = 0,
    worker_budget: int = 1,
    reduce: bool = True,
) -> Quasipolynomial:
    """Inside-out quasipolynomial as the sum of open region quasipolynomials.

    With ``reduce`` the problem is first made full-dimensional; the lattice
    modulus of the reduction is folded back into the result.  A degenerate
    arrangement gives the zero quasipolynomial.
    """
    modulus = 1
    if regions is None:
        if reduce:
            iop, emb = reduce_iop(iop)
            modulus = emb.modulus
        try:
            regions = enumerate_regions(iop, split_depth, worker_budget)
        except DegenerateArrangement:
            return Quasipolynomial.zero()
    polys = [r.polytope for r in regions]
    if worker_budget > 1 and len(polys) > 1:
        with ProcessPoolExecutor(max_workers=worker_budget) as pool:
            qps = list(pool.map(open_quasipolynomial, polys))
    else:
        qps = [open_quasipolynomial(q) for q in polys]
    return sum_quasipolynomials(qps).restricted_to_multiples(modulus).normalized()


# ---------------------------------------------------------------------------
# inside-out counting: Moebius inversion over the intersection poset


@dataclass(frozen=True)
class Flat:
    equalities: tuple  # canonical equalities including the hull
    hyperplanes: frozenset  # indices of arrangement hyperplanes containing the flat


@dataclass
class IntersectionPoset:
    flats: list
    moebius: list

    def __len__(self):
        return len(self.flats)


def _flat_key(eqs):
    red, pivots, rk = rref([list(a) + [b] for a, b in eqs])
    return tuple(tuple(r) for r in red[:rk])


def intersection_poset(iop: InsideOutPolytope) -> IntersectionPoset:
    """Flats of the arrangement meeting the closed polytope, with ``mu(0, u)``.

    Flats are generated breadth-first by intersecting with one more
    hyperplane; each flat is identified by the set of hyperplanes containing
    it, and ``mu`` follows from its defining recursion.
    """
    closed = iop.polytope.closure()
    hull, _ = affine_hull(closed)
    hs = iop.hyperplanes

    def contained(eqs):
        key_rank = len(_flat_key(eqs))
        out = []
        for i, h in enumerate(hs):
            if len(_flat_key(list(eqs) + [(h.normal, h.offset)])) == key_rank:
                out.append(i)
        return frozenset(out)

    root = Flat(tuple(hull), contained(hull))
    flats = [root]
    by_set = {root.hyperplanes: 0}
    frontier = [root]
    while frontier:
        nxt = []
        for f in frontier:
            for i, h in enumerate(hs):
                if i in f.hyperplanes:
                    continue
                eqs = list(f.equalities) + [(h.normal, h.offset)]
                key = _flat_key(eqs)
                if any(not any(row[:-1]) for row in key):
                    continue  # parallel: empty intersection
                if not is_feasible(closed.with_constraints(equalities=eqs)):
                    continue
                hset = contained(eqs)
                if hset in by_set:
                    continue
                g = Flat(tuple(canonical_equality(row[:-1], row[-1]) for row in key), hset)
                by_set[hset] = len(flats)
                flats.append(g)
                nxt.append(g)
        frontier = nxt
    # moebius values, processing flats by increasing containment set size
    order = sorted(range(len(flats)), key=lambda i: len(flats[i].hyperplanes))
    mu = [0] * len(flats)
    for i in order:
        if i == 0:
            mu[i] = 1
            continue
        hi = flats[i].hyperplanes
        mu[i] = -sum(mu[j] for j in order if flats[j].hyperplanes < hi)
    return IntersectionPoset(flats, mu)


def iop_count_moebius(iop: InsideOutPolytope, t: int, poset: IntersectionPoset | None = None) -> int:
    """Lattice points of the ``t``-th dilate off the arrangement by Moebius inversion.

    Sums ``mu(0, u)`` times the number of lattice points of the dilated open
    polytope restricted to each flat ``u``.
    """
    if iop.containing:
        return 0
    if poset is None:
        poset = intersection_poset(iop)
    total = 0
    for f, m in zip(poset.flats, poset.moebius):
        if m == 0:
            continue
        q = iop.polytope.with_constraints(equalities=f.equalities)
        total += m * count_lattice_points(q, t)
    return total


def brute_force_iop_count(iop: InsideOutPolytope, t: int) -> int:
    """Direct filter: lattice points of ``t * polytope`` on no dilated hyperplane.

    Enumerates the dilated polytope point by point; intended for small tests.
    """
    p = iop.polytope
    if iop.containing:
        return 0
    emb = equality_embedding(p.equalities, p.dim)
    if t % emb.modulus:
        return 0
    count = 0
    for x in lattice_points(p, t):
        if all(sum(a * v for a, v in zip(h.normal, x)) != t * h.offset for h in iop.hyperplanes):
            count += 1
    return count


def lattice_points(p: HPolyhedron, t: int):
    """Yield every lattice point of the ``t``-th dilate (ambient coordinates)."""
    emb = equality_embedding(p.equalities, p.dim)
    if t % emb.modulus:
        return
    rows = []
    for a, b, s in p.inequalities:
        a2, b2 = emb.pull_back(a, b)
        row = clear_denominators(list(a2) + [b2])
        rows.append((tuple(row[:-1]), row[-1], s))
    k = emb.reduced_dim
    q = HPolyhedron.make(k, (), rows)
    if q.trivially_empty:
        return
    counter = _Counter(q.inequalities, k, range(k))
    if counter.empty:
        return
    if k == 0:
        yield tuple(int(x) for x in emb.to_ambient((), t))
        return

    def walk(level, prefix):
        lo, hi = counter._range(level, prefix, t)
        for v in range(lo, hi + 1):
            prefix.append(v)
            if level == k - 1:
                yield tuple(prefix)
            else:
                yield from walk(level + 1, prefix)
            prefix.pop()

    for u in walk(0, []):
        yield tuple(int(x) for x in emb.to_ambient(u, t))
