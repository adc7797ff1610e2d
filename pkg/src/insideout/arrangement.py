"""Inside-out polytopes and region enumeration by recursive transverse splitting.

Regions are produced by a depth-first traversal of a binary tree: the open
polytope is split by each hyperplane in list order, and each piece recurses
on the remaining hyperplanes.  A hyperplane that misses the relative
interior leaves the piece unchanged.  Each region carries its lineage, the
sequence of sides (``0`` for ``a.x > b``, ``1`` for ``a.x < b``) taken at
the splits on its path; lineage order equals traversal order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from . import lp
from .errors import DegenerateArrangement, EmptyPolyhedron, ParseError
from .exact import rref
from .polytope import (
    AffineEmbedding,
    HPolyhedron,
    affine_hull,
    canonical_equality,
    full_dimensionalize,
    is_open_nonempty,
    lp_optimize,
)


@dataclass(frozen=True, order=True)
class Hyperplane:
    """``normal . x = offset`` with a primitive normal whose first nonzero entry is positive."""

    normal: tuple
    offset: int = 0

    @classmethod
    def make(cls, normal, offset=0) -> Hyperplane:
        c = canonical_equality(normal, offset)
        if c is None or len(c) == 3:
            raise ValueError("a hyperplane needs a nonzero normal")
        return cls(c[0], c[1])

    def __str__(self):
        return " ".join(str(x) for x in (self.offset, *self.normal))


@dataclass(frozen=True)
class InsideOutPolytope:
    """An open polytope paired with a deduplicated hyperplane arrangement.

    ``containing`` lists hyperplanes that contain the whole affine hull of
    the polytope; when it is nonempty every point lies on the arrangement.
    """

    polytope: HPolyhedron
    hyperplanes: tuple
    containing: tuple = ()

    @classmethod
    def make(cls, polytope: HPolyhedron, hyperplanes: Iterable) -> InsideOutPolytope:
        hull, _ = affine_hull(polytope)
        kept, containing = dedupe_restricted(hyperplanes, hull)
        return cls(polytope, tuple(kept), tuple(containing))


@dataclass(frozen=True)
class Region:
    polytope: HPolyhedron
    lineage: str = ""


def dedupe_restricted(hyperplanes: Iterable, hull_equalities: Sequence) -> tuple[list, list]:
    """Reduce each hyperplane modulo the hull equalities and remove duplicates.

    Returns ``(kept, containing)``: the distinct restricted hyperplanes in
    first-occurrence order, and those that contain the hull (``0 = 0`` after
    reduction).  Hyperplanes that never meet the hull (``0 = c``) are dropped.
    """
    hyperplanes = [h if isinstance(h, Hyperplane) else Hyperplane.make(*h) for h in hyperplanes]
    if hull_equalities:
        red, pivots, rk = rref([list(a) + [b] for a, b in hull_equalities])
        red = [row for row in red[:rk]]
    else:
        red, pivots = [], ()
    kept, containing, seen = [], [], set()
    for h in hyperplanes:
        v = [Fraction(x) for x in h.normal] + [Fraction(h.offset)]
        for row, p in zip(red, pivots):
            f = v[p]
            if f:
                v = [x - f * y for x, y in zip(v, row)]
        c = canonical_equality(v[:-1], v[-1])
        if c is None:
            containing.append(h)
            continue
        if len(c) == 3:
            continue
        r = Hyperplane(c[0], c[1])
        if r not in seen:
            seen.add(r)
            kept.append(r)
    return kept, containing


def is_transverse(p: HPolyhedron, h: Hyperplane) -> bool:
    """Whether ``h`` meets the relative interior of ``p``.

    Uses two exact LPs with the hyperplane normal as objective.
    """
    hi = lp_optimize(p, h.normal, "max")
    if hi.status == lp.INFEASIBLE:
        raise EmptyPolyhedron("cannot test transversality on an empty polyhedron")
    if hi.optimal and hi.optimum <= h.offset:
        return False
    lo = lp_optimize(p, h.normal, "min")
    return not (lo.optimal and lo.optimum >= h.offset)


def prune_redundant(p: HPolyhedron) -> HPolyhedron:
    """Drop inequalities implied by the others.

    For open polytopes a constraint whose bound is attained but not beaten
    is also dropped since the interior is unchanged.
    """
    ineqs = list(p.inequalities)
    keep = []
    open_ = p.is_open
    i = 0
    while i < len(ineqs):
        a, b, s = ineqs[i]
        others = HPolyhedron(p.dim, p.equalities, tuple(keep + ineqs[i + 1:]))
        res = lp_optimize(others, a, "min")
        if res.optimal and (res.optimum > b or (res.optimum == b and (open_ or not s))):
            i += 1
            continue
        keep.append(ineqs[i])
        i += 1
    return HPolyhedron(p.dim, p.equalities, tuple(keep))


def split(p: HPolyhedron, h: Hyperplane, prune: bool = True) -> list[HPolyhedron]:
    """Pieces of ``p`` minus ``h``: two open halves when transverse, else ``[p]``."""
    if not is_transverse(p, h):
        return [p]
    neg = tuple(-x for x in h.normal)
    pieces = [
        p.with_constraints(inequalities=[(h.normal, h.offset, True)]),
        p.with_constraints(inequalities=[(neg, -h.offset, True)]),
    ]
    if prune:
        pieces = [prune_redundant(q) for q in pieces]
    return pieces


# ---------------------------------------------------------------------------
# enumeration


def _dfs(polytope, hyperplanes, start, lineage, stats=None, prune=True) -> Iterator[Region]:
    stack = [(polytope, start, lineage)]
    peak = 1
    while stack:
        q, i, lin = stack.pop()
        while i < len(hyperplanes):
            pieces = split(q, hyperplanes[i], prune)
            i += 1
            if len(pieces) == 2:
                stack.append((pieces[1], i, lin + "1"))
                stack.append((pieces[0], i, lin + "0"))
                break
        else:
            yield Region(q, lin)
            continue
        peak = max(peak, len(stack))
        if stats is not None:
            stats["peak_live"] = max(stats.get("peak_live", 0), peak)


def _subproblem(args) -> list[Region]:
    polytope, hyperplanes, start, lineage, prune = args
    return list(_dfs(polytope, hyperplanes, start, lineage, prune=prune))


def expand_frontier(polytope, hyperplanes, depth: int, prune: bool = True) -> list[tuple]:
    """Subproblems ``(polytope, next_index, lineage)`` after the first ``depth`` hyperplanes."""
    frontier = [(polytope, 0, "")]
    for level in range(min(depth, len(hyperplanes))):
        nxt = []
        for q, i, lin in frontier:
            pieces = split(q, hyperplanes[level], prune)
            if len(pieces) == 1:
                nxt.append((q, level + 1, lin))
            else:
                nxt.append((pieces[0], level + 1, lin + "0"))
                nxt.append((pieces[1], level + 1, lin + "1"))
        frontier = nxt
    return frontier


def _check(iop: InsideOutPolytope):
    if iop.containing:
        h = iop.containing[0]
        raise DegenerateArrangement(f"hyperplane {h} contains the affine hull of the polytope", h)


def enumerate_regions(
    iop: InsideOutPolytope,
    split_depth: int = 0,
    worker_budget: int = 1,
    stats: dict | None = None,
    prune: bool = True,
) -> list[Region]:
    """All regions of ``iop`` in lineage order.

    The first ``split_depth`` hyperplanes are expanded up front and the
    resulting subproblems are handed to ``worker_budget`` processes; the
    output does not depend on either parameter.
    """
    _check(iop)
    p = iop.polytope
    if not is_open_nonempty(p):
        return []
    hs = iop.hyperplanes
    if split_depth <= 0 and worker_budget <= 1:
        return list(_dfs(p, hs, 0, "", stats, prune))
    frontier = expand_frontier(p, hs, split_depth, prune)
    jobs = [(q, hs, i, lin, prune) for q, i, lin in frontier]
    if worker_budget <= 1 or len(jobs) == 1:
        parts = [_subproblem(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=worker_budget) as pool:
            parts = list(pool.map(_subproblem, jobs))
    return [r for part in parts for r in part]


def iter_regions(iop: InsideOutPolytope, after: str | None = None, prune: bool = True) -> Iterator[Region]:
    """Regions in lineage order, skipping every region whose lineage is ``<= after``.

    Subtrees lying entirely before ``after`` are never expanded, so a run can
    resume from a checkpointed lineage.
    """
    _check(iop)
    p = iop.polytope
    if not is_open_nonempty(p):
        return
    hs = iop.hyperplanes
    stack = [(p, 0, "")]
    while stack:
        q, i, lin = stack.pop()
        if after is not None and not after.startswith(lin) and lin < after:
            continue
        while i < len(hs):
            pieces = split(q, hs[i], prune)
            i += 1
            if len(pieces) == 2:
                stack.append((pieces[1], i, lin + "1"))
                stack.append((pieces[0], i, lin + "0"))
                break
        else:
            if after is None or lin > after:
                yield Region(q, lin)


# ---------------------------------------------------------------------------
# reduction to full dimension


def reduce_iop(iop: InsideOutPolytope) -> tuple[InsideOutPolytope, AffineEmbedding]:
    """Full-dimensional, lattice-equivalent copy of ``iop``.

    Counts at dilation ``t`` agree with the original when
    ``embedding.modulus | t``; the original has no lattice points otherwise.
    """
    q, emb = full_dimensionalize(iop.polytope)
    hs = []
    for h in iop.hyperplanes:
        a, b = emb.pull_back(h.normal, h.offset)
        hs.append((a, b))
    hs_clean = []
    for a, b in hs:
        c = canonical_equality(a, b)
        if c is None:
            hs_clean = None
            break
        if len(c) == 2:
            hs_clean.append(Hyperplane(c[0], c[1]))
    if hs_clean is None or iop.containing:
        # some hyperplane contains the hull: keep the degeneracy visible
        contain = iop.containing or tuple(iop.hyperplanes)
        return InsideOutPolytope(q, (), tuple(contain)), emb
    kept, containing = dedupe_restricted(hs_clean, [])
    return InsideOutPolytope(q, tuple(kept), tuple(containing)), emb


# ---------------------------------------------------------------------------
# text format


def parse_hyperplanes(text: str, dim: int) -> list[Hyperplane]:
    """One hyperplane per line, ``b a1 .. ad`` meaning ``a.x = b``."""
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            vals = [int(x) for x in body.split()]
        except ValueError:
            raise ParseError(f"expected integers, got {body!r}", no) from None
        if len(vals) != dim + 1:
            raise ParseError(f"expected {dim + 1} integers, got {len(vals)}", no)
        if not any(vals[1:]):
            raise ParseError("hyperplane normal is zero", no)
        out.append(Hyperplane.make(vals[1:], vals[0]))
    return out
