"""Magic-square counting: inside-out polytope builders, pipeline and a backtracking oracle.

Cells are numbered row-major, ``cell(i, j) = i*n + j``.  The affine
problem fixes every line sum to the dilation ``t``; the cubical problem
keeps entries strictly between ``0`` and ``t`` and only asks that all line
sums agree.
"""

from __future__ import annotations

import functools
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .arrangement import InsideOutPolytope, enumerate_regions, reduce_iop
from .errors import DegenerateArrangement, SymmetryViolation
from .ehrhart import iop_count_moebius, intersection_poset, open_quasipolynomial, sum_quasipolynomials, verify_quasipolynomial
from .gfun import Quasipolynomial, RationalGF, qp_to_gf
from .polytope import HPolyhedron

AFFINE = "affine"
CUBICAL = "cubical"


@dataclass(frozen=True)
class MagicSpec:
    n: int
    variant: str = AFFINE

    def __post_init__(self):
        if self.variant not in (AFFINE, CUBICAL):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.n < 2:
            raise ValueError("side length must be at least 2")


def line_sum_system(n: int) -> list[tuple[int, ...]]:
    """Rows, columns, main diagonal and anti-diagonal as tuples of cell indices."""
    rows = [tuple(i * n + j for j in range(n)) for i in range(n)]
    cols = [tuple(i * n + j for i in range(n)) for j in range(n)]
    diag = tuple(i * n + i for i in range(n))
    anti = tuple(i * n + (n - 1 - i) for i in range(n))
    return rows + cols + [diag, anti]


def _indicator(cells, size):
    v = [0] * size
    for c in cells:
        v[c] += 1
    return tuple(v)


def magic_polytope(spec: MagicSpec) -> HPolyhedron:
    n = spec.n
    d = n * n
    lines = [_indicator(line, d) for line in line_sum_system(n)]
    units = [_indicator([c], d) for c in range(d)]
    if spec.variant == AFFINE:
        eqs = [(a, 1) for a in lines]
        ineqs = [(e, 0, True) for e in units]
    else:
        first = lines[0]
        eqs = [(tuple(x - y for x, y in zip(a, first)), 0) for a in lines[1:]]
        ineqs = [(e, 0, True) for e in units] + [(tuple(-x for x in e), -1, True) for e in units]
    return HPolyhedron.make(d, eqs, ineqs)


def difference_hyperplanes(n: int) -> list[tuple]:
    """``x_c = x_c'`` for all cell pairs in lexicographic order, as ``(normal, 0)``."""
    d = n * n
    out = []
    for c, c2 in itertools.combinations(range(d), 2):
        v = [0] * d
        v[c], v[c2] = 1, -1
        out.append((tuple(v), 0))
    return out


def build_magic_iop(spec: MagicSpec) -> InsideOutPolytope:
    """The inside-out polytope whose dilates count magic squares of ``spec``."""
    if spec.n < 3:
        raise ValueError("magic inside-out polytopes are built for n >= 3 only")
    return InsideOutPolytope.make(magic_polytope(spec), difference_hyperplanes(spec.n))


@dataclass
class MagicReport:
    spec: MagicSpec
    quasipolynomial: Quasipolynomial
    gf: RationalGF
    regions: int
    hyperplanes: int
    reduced_dim: int
    modulus: int
    timings: dict = field(default_factory=dict)


def default_split_depth(hyperplanes: int, worker_budget: int) -> int:
    """No up-front splitting for a single worker, otherwise ``min(8, |H|)``."""
    return 0 if worker_budget <= 1 else min(8, hyperplanes)


def run_magic(
    spec: MagicSpec,
    split_depth: int | None = None,
    worker_budget: int = 1,
    extra: int = 1,
) -> MagicReport:
    """Full pipeline: build, reduce, enumerate regions, sum open quasipolynomials.

    ``extra`` is the number of verification dilates per residue class used
    when interpolating each region's quasipolynomial.
    """
    timings = {}
    clock = time.perf_counter()
    if spec.n < 3:
        zero = Quasipolynomial.zero()
        return MagicReport(spec, zero, RationalGF(), 0, 0, 0, 1, timings)
    iop = build_magic_iop(spec)
    reduced, emb = reduce_iop(iop)
    timings["build"] = time.perf_counter() - clock
    if split_depth is None:
        split_depth = default_split_depth(len(reduced.hyperplanes), worker_budget)

    clock = time.perf_counter()
    try:
        regions = enumerate_regions(reduced, split_depth, worker_budget)
    except DegenerateArrangement:
        regions = []
    timings["regions"] = time.perf_counter() - clock

    clock = time.perf_counter()
    polys = [r.polytope for r in regions]
    if worker_budget > 1 and len(polys) > 1:
        with ProcessPoolExecutor(max_workers=worker_budget) as pool:
            qps = list(pool.map(functools.partial(open_quasipolynomial, extra=extra), polys))
    else:
        qps = [open_quasipolynomial(p, extra) for p in polys]
    qp = sum_quasipolynomials(qps).restricted_to_multiples(emb.modulus).normalized()
    timings["ehrhart"] = time.perf_counter() - clock

    clock = time.perf_counter()
    gf = qp_to_gf(qp, start=1)
    timings["gf"] = time.perf_counter() - clock
    return MagicReport(spec, qp, gf, len(regions), len(reduced.hyperplanes), emb.reduced_dim, emb.modulus, timings)


def count_magic(spec: MagicSpec, split_depth: int | None = None, worker_budget: int = 1) -> Quasipolynomial:
    """``a_n(t)`` (affine) or ``c_n(t)`` (cubical) as a quasipolynomial."""
    return run_magic(spec, split_depth, worker_budget).quasipolynomial


def verify_magic(report: MagicReport, per_residue: int = 2) -> list[int]:
    """Check a report against Moebius-inversion counts at extra dilates of every residue class."""
    if report.spec.n < 3:
        return []
    iop = build_magic_iop(report.spec)
    poset = intersection_poset(iop)
    return verify_quasipolynomial(
        report.quasipolynomial, lambda t: iop_count_moebius(iop, t, poset), per_residue
    )


# ---------------------------------------------------------------------------
# backtracking oracle

ORACLE_LIMITS = {(3, AFFINE): 60, (3, CUBICAL): 60, (4, AFFINE): 36, (4, CUBICAL): 18}


def oracle_limit(spec: MagicSpec) -> int | None:
    if spec.n <= 2:
        return 10**6
    return ORACLE_LIMITS.get((spec.n, spec.variant))


def _plan(n: int, cubical: bool):
    """Cell order for the search.

    Each step is ``(cell, determining_line, lines_to_check)``; a determined
    cell takes whatever value completes its line.
    """
    lines = line_sum_system(n)
    d = n * n
    cell_lines = [[k for k, line in enumerate(lines) if c in line] for c in range(d)]
    assigned: set = set()
    steps = []
    sum_known = not cubical
    while len(assigned) < d:
        det = None
        if sum_known:
            for k, line in enumerate(lines):
                rest = [c for c in line if c not in assigned]
                if len(rest) == 1:
                    det = (rest[0], k)
                    break
        if det is None:
            def urgency(c):
                return (min(sum(1 for x in lines[k] if x not in assigned) for k in cell_lines[c]), c)
            cands = [c for c in range(d) if c not in assigned]
            if not sum_known:
                cands = [c for c in cands if c in lines[0]] or cands
            cell, line = min(cands, key=urgency), None
        else:
            cell, line = det
        assigned.add(cell)
        done = [k for k in cell_lines[cell] if k != line and all(x in assigned for x in lines[k])]
        steps.append((cell, line, done))
        if not sum_known and all(x in assigned for x in lines[0]):
            sum_known = True
    return lines, cell_lines, steps


class _Search:
    def __init__(self, spec: MagicSpec, t: int):
        n = spec.n
        self.n = n
        self.cubical = spec.variant == CUBICAL
        self.t = t
        self.lines, self.cell_lines, self.steps = _plan(n, self.cubical)
        self.d = n * n
        self.vmax = t - 1
        self.values = [0] * self.d
        self.partial = [0] * len(self.lines)
        self.filled = [0] * len(self.lines)
        self.used = set()
        self.total = 0

    def _fits(self, v):
        return 1 <= v <= self.vmax and v not in self.used

    def _remaining_min(self, k):
        """Smallest possible sum of ``k`` distinct unused positive values."""
        s, v = 0, 1
        while k:
            if v not in self.used:
                s += v
                k -= 1
            v += 1
        return s

    def run(self, first_values=None) -> int:
        target = None if self.cubical else self.t
        return self._step(0, target, first_values)

    def _step(self, i, target, first_values=None):
        if i == len(self.steps):
            return 1
        cell, line, done = self.steps[i]
        if line is not None:
            candidates = (target - self.partial[line],)
        else:
            hi = self.vmax
            if target is not None:
                for k in self.cell_lines[cell]:
                    left = len(self.lines[k]) - self.filled[k] - 1
                    hi = min(hi, target - self.partial[k] - left)
            candidates = range(1, hi + 1)
            if first_values is not None:
                candidates = [v for v in candidates if v in first_values]
        count = 0
        lines = self.cell_lines[cell]
        for v in candidates:
            if not self._fits(v):
                continue
            self.used.add(v)
            self.total += v
            for k in lines:
                self.partial[k] += v
                self.filled[k] += 1
            ok = True
            tgt = target
            if tgt is None and self.filled[0] == len(self.lines[0]):
                tgt = self.partial[0]
            if tgt is not None:
                for k in done:
                    if self.partial[k] != tgt:
                        ok = False
                        break
                if ok:
                    for k in lines:
                        left = len(self.lines[k]) - self.filled[k]
                        if self.partial[k] + left > tgt:
                            ok = False
                            break
                if ok:
                    remaining = self.d - i - 1
                    if self.total + self._remaining_min(remaining) > self.n * tgt:
                        ok = False
            if ok:
                count += self._step(i + 1, tgt)
            for k in lines:
                self.partial[k] -= v
                self.filled[k] -= 1
            self.total -= v
            self.used.discard(v)
        return count


def _search_chunk(args):
    spec, t, values = args
    return _Search(spec, t).run(set(values))


def brute_force_count(spec: MagicSpec, t: int, jobs: int = 1) -> int:
    """Count magic squares for ``spec`` at parameter ``t`` by backtracking.

    Affine: distinct positive entries with every line summing to ``t``.
    Cubical: distinct entries in ``1 .. t-1`` with all line sums equal.
    With ``jobs > 1`` the values of the first searched cell are split
    across processes.
    """
    if t < 2:
        return 0
    if jobs <= 1:
        return _Search(spec, t).run()
    chunks = [(spec, t, list(range(1 + k, t, jobs))) for k in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return sum(pool.map(_search_chunk, chunks))


def symmetry_factor_check(spec: MagicSpec, ts, counts=None) -> dict:
    """Check that 8 divides every count; the dihedral group acts freely on magic squares.

    ``counts`` maps ``t`` to a value (default: the backtracking oracle).
    Returns ``{t: count}``; raises :class:`SymmetryViolation` on failure.
    """
    report = {}
    for t in ts:
        c = counts[t] if counts is not None else brute_force_count(spec, t)
        c = int(c)
        if c % 8:
            raise SymmetryViolation(f"count {c} at t={t} is not divisible by 8")
        report[t] = c
    return report
