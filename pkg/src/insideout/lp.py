"""Exact simplex method over the rationals with Bland's anti-cycling rule.

Problems have free variables ``x`` and constraints ``a . x >= b``.  The
solver works on a dictionary whose basic variables are either free
variables (pivoted in first and never leaving) or constraint slacks
``s_i = a_i . x - b_i >= 0``.  Feasibility uses a single artificial
variable added to every slack row (Chvatal's initialization).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    optimum: Fraction | None = None
    witness: tuple[Fraction, ...] | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Dictionary:
    def __init__(self, rows: Sequence[tuple[Sequence, object]], n: int):
        self.n = n
        self.m = len(rows)
        self.art = n + self.m
        # nonbasic ids, basic ids and tableau rows [const, coef per nonbasic]
        self.nonbasic = list(range(n))
        self.basic = [n + i for i in range(self.m)]
        self.rows = [[Fraction(-b)] + [Fraction(x) for x in a] for a, b in rows]
        self.obj = [Fraction(0)] * (n + 1)

    def is_free(self, var: int) -> bool:
        return var < self.n

    def pivot(self, r: int, c: int):
        row = self.rows[r]
        p = row[c + 1]
        leaving = self.basic[r]
        new = [-x / p for x in row]
        new[c + 1] = 1 / p
        self.rows[r] = new
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[c + 1]
            if f:
                other[c + 1] = 0
                for j, v in enumerate(new):
                    if v:
                        other[j] += f * v
        f = self.obj[c + 1]
        if f:
            self.obj[c + 1] = 0
            for j, v in enumerate(new):
                if v:
                    self.obj[j] += f * v
        self.basic[r] = self.nonbasic[c]
        self.nonbasic[c] = leaving

    def bounded_rows(self):
        return [i for i, v in enumerate(self.basic) if not self.is_free(v)]

    def simplex(self) -> str:
        """Maximize the objective row with Bland's rule from a feasible dictionary."""
        while True:
            entering = None
            for j, var in enumerate(self.nonbasic):
                if self.is_free(var) or self.obj[j + 1] <= 0:
                    continue
                if entering is None or var < self.nonbasic[entering]:
                    entering = j
            if entering is None:
                return OPTIMAL
            best = None
            for i in self.bounded_rows():
                coef = self.rows[i][entering + 1]
                if coef < 0:
                    ratio = self.rows[i][0] / -coef
                    key = (ratio, self.basic[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                self._ray_column = entering
                return UNBOUNDED
            self.pivot(best[1], entering)

    def point(self) -> tuple[Fraction, ...]:
        x = [Fraction(0)] * self.n
        for i, var in enumerate(self.basic):
            if var < self.n:
                x[var] = self.rows[i][0]
        return tuple(x)


def solve(constraints, objective, n: int | None = None, maximize: bool = True) -> LPResult:
    """Optimize ``objective . x`` subject to ``a . x >= b`` for ``(a, b)`` in constraints.

    Returns an :class:`LPResult`; for ``unbounded`` the witness is an
    improving ray of the feasible set.
    """
    constraints = list(constraints)
    if n is None:
        n = len(objective)
    d = _Dictionary(constraints, n)

    # pivot every free variable into the basis where possible
    for var in range(n):
        c = d.nonbasic.index(var)
        r = next((i for i in d.bounded_rows() if d.rows[i][c + 1] != 0), None)
        if r is not None:
            d.pivot(r, c)

    # phase one
    rows = d.bounded_rows()
    worst = min(rows, key=lambda i: (d.rows[i][0], d.basic[i]), default=None)
    if worst is not None and d.rows[worst][0] < 0:
        for i, row in enumerate(d.rows):
            row.append(Fraction(0) if d.is_free(d.basic[i]) else Fraction(1))
        d.nonbasic.append(d.art)
        d.obj = [Fraction(0)] * (len(d.nonbasic) + 1)
        d.obj[-1] = Fraction(-1)
        d.pivot(worst, len(d.nonbasic) - 1)
        d.simplex()
        if d.obj[0] < 0:
            return LPResult(INFEASIBLE)
        if d.art in d.basic:
            r = d.basic.index(d.art)
            c = next(j for j, v in enumerate(d.nonbasic)
                     if not d.is_free(v) and d.rows[r][j + 1] != 0)
            d.pivot(r, c)
        c = d.nonbasic.index(d.art)
        for row in d.rows:
            del row[c + 1]
        del d.nonbasic[c]

    # phase two
    sign = 1 if maximize else -1
    obj = [Fraction(0)] * (len(d.nonbasic) + 1)
    for var, coef in enumerate(objective):
        coef = sign * Fraction(coef)
        if not coef:
            continue
        if var in d.basic:
            row = d.rows[d.basic.index(var)]
            for j, v in enumerate(row):
                obj[j] += coef * v
        else:
            obj[d.nonbasic.index(var) + 1] += coef
    d.obj = obj
    for j, var in enumerate(d.nonbasic):
        if d.is_free(var) and d.obj[j + 1] != 0:
            step = Fraction(1 if d.obj[j + 1] > 0 else -1)
            ray = [Fraction(0)] * n
            ray[var] = step
            for i, b in enumerate(d.basic):
                if b < n:
                    ray[b] = step * d.rows[i][j + 1]
            return LPResult(UNBOUNDED, witness=tuple(ray))
    status = d.simplex()
    if status == UNBOUNDED:
        c = d._ray_column
        ray = [Fraction(0)] * n
        for i, var in enumerate(d.basic):
            if var < n:
                ray[var] = d.rows[i][c + 1]
        return LPResult(UNBOUNDED, witness=tuple(ray))
    return LPResult(OPTIMAL, sign * d.obj[0], d.point())


def feasible_point(constraints, n: int):
    """Some point satisfying all constraints, or None."""
    res = solve(constraints, [0] * n, n)
    return res.witness if res.optimal else None
