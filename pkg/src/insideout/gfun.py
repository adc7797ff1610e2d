"""Quasipolynomials and rational generating functions over products of ``(1 - z^k)``.

A :class:`RationalGF` is kept in a canonical reduced form: numerator and
denominator share no cyclotomic factor, and the remaining denominator is
rebuilt greedily from the largest order down as a product of ``(1 - z^k)``.
Numerator coefficients are integers; any rational content lives in
``scale`` (always ``1/D`` for a positive integer ``D``).
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import Polynomial, gcd_all, interpolate, lcm_all

# ---------------------------------------------------------------------------
# quasipolynomials


class Quasipolynomial:
    """``q(t) = constituents[t mod period](t)``."""

    __slots__ = ("period", "constituents")

    def __init__(self, constituents: Sequence):
        if not constituents:
            raise ValueError("a quasipolynomial needs at least one constituent")
        self.constituents = tuple(c if isinstance(c, Polynomial) else Polynomial(c) for c in constituents)
        self.period = len(self.constituents)

    @classmethod
    def polynomial(cls, poly) -> Quasipolynomial:
        return cls([poly if isinstance(poly, Polynomial) else Polynomial(poly)])

    @classmethod
    def zero(cls) -> Quasipolynomial:
        return cls([Polynomial()])

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.constituents)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.constituents)

    def __call__(self, t) -> Fraction:
        return self.constituents[t % self.period](t)

    evaluate = __call__

    def with_period(self, period: int) -> Quasipolynomial:
        if period % self.period:
            raise ValueError(f"{period} is not a multiple of {self.period}")
        return Quasipolynomial([self.constituents[r % self.period] for r in range(period)])

    def normalized(self) -> Quasipolynomial:
        """Equivalent quasipolynomial with the smallest possible period."""
        p = self.period
        for d in range(1, p + 1):
            if p % d == 0 and all(self.constituents[r] == self.constituents[r % d] for r in range(p)):
                return Quasipolynomial(self.constituents[:d])
        return self

    def __add__(self, other: Quasipolynomial) -> Quasipolynomial:
        p = self.period * other.period // math.gcd(self.period, other.period)
        a, b = self.with_period(p), other.with_period(p)
        return Quasipolynomial([x + y for x, y in zip(a.constituents, b.constituents)])

    def __neg__(self):
        return Quasipolynomial([-c for c in self.constituents])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        return Quasipolynomial([c * Fraction(k) for c in self.constituents])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Quasipolynomial):
            return NotImplemented
        return self.normalized().constituents == other.normalized().constituents

    def __hash__(self):
        return hash(self.normalized().constituents)

    def reciprocal(self, dim: int) -> Quasipolynomial:
        """The quasipolynomial ``t -> (-1)^dim * self(-t)``."""
        p = self.period
        sign = -1 if dim % 2 else 1
        return Quasipolynomial(
            [self.constituents[(-r) % p].compose_scale(-1) * sign for r in range(p)]
        )

    def restricted_to_multiples(self, modulus: int) -> Quasipolynomial:
        """``t -> self(t)`` when ``modulus | t`` and ``0`` otherwise."""
        if modulus == 1:
            return self
        p = self.period * modulus // math.gcd(self.period, modulus)
        q = self.with_period(p)
        return Quasipolynomial(
            [c if r % modulus == 0 else Polynomial() for r, c in enumerate(q.constituents)]
        )

    def format_lines(self, var: str = "t") -> list[str]:
        """One line per residue class, classes with equal constituents merged."""
        q = self.normalized()
        if q.period == 1:
            return [q.constituents[0].format(var)]
        groups: dict = {}
        for r, c in enumerate(q.constituents):
            groups.setdefault(c, []).append(r)
        lines = []
        for c, rs in sorted(groups.items(), key=lambda kv: kv[1][0]):
            rs_txt = ",".join(str(r) for r in rs)
            lines.append(f"{var} = {rs_txt} mod {q.period}: {c.format(var)}")
        return lines

    def __str__(self):
        return "\n".join(self.format_lines())

    def __repr__(self):
        return f"Quasipolynomial(period={self.period}, {[str(c) for c in self.constituents]})"

    def to_record(self) -> dict:
        q = self.normalized()
        return {
            "period": q.period,
            "degree": q.degree,
            "constituents": [[str(x) for x in c.coeffs] for c in q.constituents],
        }

    @classmethod
    def from_record(cls, record: dict) -> Quasipolynomial:
        return cls([Polynomial([Fraction(x) for x in c]) for c in record["constituents"]])


def qp_evaluate(q: Quasipolynomial, t: int) -> Fraction:
    return q(t)


# ---------------------------------------------------------------------------
# integer polynomial helpers (lists, index = degree)


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _add(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim(out)


def _divmod_unit(a, b):
    """Division by an integer polynomial whose leading coefficient is +-1."""
    rem = list(a)
    db = len(b) - 1
    lead = b[-1]
    if len(rem) <= db:
        return [], _trim(rem)
    quot = [0] * (len(rem) - db)
    for k in range(len(rem) - db - 1, -1, -1):
        q = rem[k + db] * lead
        quot[k] = q
        if q:
            for j, y in enumerate(b):
                rem[k + j] -= q * y
    return _trim(quot), _trim(rem[:db])


@functools.lru_cache(maxsize=None)
def cyclotomic(m: int) -> tuple:
    """``Phi_m`` for ``m > 1``; for ``m == 1`` the factor ``1 - z``."""
    if m == 1:
        return (1, -1)
    p = [-1] + [0] * (m - 1) + [1]
    for d in _divisors(m):
        if d < m:
            f = cyclotomic(d) if d > 1 else (-1, 1)
            p, r = _divmod_unit(p, list(f))
            assert not r
    return tuple(p)


@functools.lru_cache(maxsize=None)
def _divisors(k: int) -> tuple:
    return tuple(d for d in range(1, k + 1) if k % d == 0)


def _exponents(dens) -> dict:
    e: dict = {}
    for k in dens:
        for m in _divisors(k):
            e[m] = e.get(m, 0) + 1
    return e


# ---------------------------------------------------------------------------
# rational generating functions


@dataclass(frozen=True)
class RationalGF:
    """``scale * numerator(z) / prod(1 - z^k for k in denominators)``."""

    numerator: tuple = ()
    denominators: tuple = ()
    scale: Fraction = Fraction(1)

    @classmethod
    def from_parts(cls, numerator: Iterable, denominators: Iterable = (), scale=1) -> RationalGF:
        """Canonical form of an arbitrary (possibly rational) numerator over ``(1 - z^k)`` factors."""
        num = [Fraction(c) * Fraction(scale) for c in numerator]
        den = lcm_all(c.denominator for c in num)
        ints = [int(c * den) for c in num]
        return _canonical(ints, Fraction(1, den), _exponents(denominators))

    def is_zero(self) -> bool:
        return not self.numerator

    def __add__(self, other):
        return gf_add(self, other)

    def series(self, n: int) -> list:
        return gf_series(self, n)

    def format(self, var: str = "z") -> str:
        return _format_gf(self, var)

    def __str__(self):
        return self.format()

    def to_record(self) -> dict:
        return {
            "numerator": list(self.numerator),
            "scale": str(self.scale),
            "denominator": list(self.denominators),
            "text": self.format(),
        }


def _canonical(num: list, scale: Fraction, exps: dict) -> RationalGF:
    num = _trim(list(num))
    if not num:
        return RationalGF((), (), Fraction(1))
    exps = {m: e for m, e in exps.items() if e}
    for m in sorted(exps, reverse=True):
        f = list(cyclotomic(m))
        while exps[m]:
            q, r = _divmod_unit(num, f)
            if r:
                break
            num = q
            exps[m] -= 1
    dens = []
    while any(exps.values()):
        k = max(m for m, e in exps.items() if e)
        dens.append(k)
        for m in _divisors(k):
            if exps.get(m, 0):
                exps[m] -= 1
            else:
                num = _mul(num, list(cyclotomic(m)))
    # integer numerator; rational content moved into scale = 1/D
    g = gcd_all(num)
    scale = scale * g
    num = [c // g for c in num]
    if scale < 0:
        scale, num = -scale, [-c for c in num]
    whole = scale.numerator
    num = [c * whole for c in num]
    scale = Fraction(1, scale.denominator)
    return RationalGF(tuple(num), tuple(sorted(dens)), scale)


def gf_add(a: RationalGF, b: RationalGF) -> RationalGF:
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    ea, eb = _exponents(a.denominators), _exponents(b.denominators)
    e = {m: max(ea.get(m, 0), eb.get(m, 0)) for m in set(ea) | set(eb)}
    na, nb = list(a.numerator), list(b.numerator)
    for m, k in e.items():
        for _ in range(k - ea.get(m, 0)):
            na = _mul(na, list(cyclotomic(m)))
        for _ in range(k - eb.get(m, 0)):
            nb = _mul(nb, list(cyclotomic(m)))
    den = lcm_all([a.scale.denominator, b.scale.denominator])
    fa = int(a.scale * den)
    fb = int(b.scale * den)
    num = _add([c * fa for c in na], [c * fb for c in nb])
    return _canonical(num, Fraction(1, den), e)


def gf_sum(gfs: Iterable[RationalGF]) -> RationalGF:
    total = RationalGF()
    for g in gfs:
        total = gf_add(total, g)
    return total


def gf_series(g: RationalGF, n: int) -> list:
    """Coefficients of ``z^0 .. z^n``; ints when integral."""
    s = [Fraction(0)] * (n + 1)
    for i, c in enumerate(g.numerator[: n + 1]):
        s[i] = Fraction(c)
    for k in g.denominators:
        for i in range(k, n + 1):
            s[i] += s[i - k]
    out = []
    for c in s:
        c = c * g.scale
        out.append(int(c) if c.denominator == 1 else c)
    return out


def qp_to_gf(q: Quasipolynomial, start: int = 0) -> RationalGF:
    """Generating function ``sum_{t >= start} q(t) z^t``.

    Counting functions of open polytopes and inside-out polytopes are only
    meaningful for ``t >= 1`` and use ``start=1``; the quasipolynomial value
    at ``t = 0`` is then left out of the series.
    """
    if q.is_zero():
        return RationalGF()
    q = q.normalized()
    p, d = q.period, q.degree
    length = p * (d + 1)
    values = [q(t) for t in range(length)]
    # multiply the series by (1 - z^p)^(d+1); the product is a polynomial of degree < length
    factor = [1]
    for _ in range(d + 1):
        factor = _mul(factor, [1] + [0] * (p - 1) + [-1])
    low = [q(t) for t in range(start)]
    num = [Fraction(0)] * max(length, len(factor) + start)
    for i, c in enumerate(factor):
        if c:
            for j in range(length - i):
                num[i + j] += c * values[j]
            for j, v in enumerate(low):
                num[i + j] -= c * v
    return RationalGF.from_parts(num, [p] * (d + 1))


def gf_to_qp(g: RationalGF) -> Quasipolynomial:
    """Quasipolynomial agreeing with the series coefficient of ``z^t`` for ``t > deg N - deg D``.

    For a proper fraction (numerator degree below the denominator degree)
    that is every ``t >= 0``.
    """
    if g.is_zero():
        return Quasipolynomial.zero()
    p = lcm_all(g.denominators) if g.denominators else 1
    d = len(g.denominators) - 1
    first = max(0, len(g.numerator) - sum(g.denominators))
    j0 = -(-first // p)
    s = gf_series(g, p * (j0 + d + 2))
    cons = []
    for r in range(p):
        pts = [(r + p * (j0 + j), s[r + p * (j0 + j)]) for j in range(max(d, 0) + 1)]
        cons.append(interpolate(pts))
    return Quasipolynomial(cons).normalized()


# ---------------------------------------------------------------------------
# grouped summation


STRATEGIES = ("sequential", "balanced-tree", "bucketed-by-denominator")


class _Tracker:
    def __init__(self):
        self.additions = 0
        self.max_degree = 0
        self.max_bits = 0

    def add(self, a, b):
        r = gf_add(a, b)
        self.additions += 1
        self.max_degree = max(self.max_degree, len(r.numerator) - 1)
        if r.numerator:
            self.max_bits = max(self.max_bits, max(abs(c) for c in r.numerator).bit_length())
        return r


def gf_simplify_grouped(gfs: Sequence[RationalGF], strategy: str = "sequential", stats: dict | None = None) -> RationalGF:
    """Sum generating functions with a chosen association order.

    The result does not depend on ``strategy``.  If ``stats`` is given it is
    filled with elapsed seconds, number of additions and the largest
    intermediate numerator degree and coefficient bit length.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    tr = _Tracker()
    start = time.perf_counter()
    gfs = list(gfs)
    if strategy == "sequential":
        total = RationalGF()
        for g in gfs:
            total = tr.add(total, g)
    elif strategy == "balanced-tree":
        level = gfs or [RationalGF()]
        while len(level) > 1:
            nxt = [tr.add(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
            if len(level) % 2:
                nxt.append(level[-1])
            level = nxt
        total = level[0]
    else:
        buckets: dict = {}
        for g in gfs:
            buckets.setdefault(g.denominators, []).append(g)
        total = RationalGF()
        for key in sorted(buckets):
            part = RationalGF()
            for g in buckets[key]:
                part = tr.add(part, g)
            total = tr.add(total, part)
    if stats is not None:
        stats.update(
            strategy=strategy,
            seconds=time.perf_counter() - start,
            additions=tr.additions,
            max_numerator_degree=tr.max_degree,
            max_coefficient_bits=tr.max_bits,
        )
    return total


# ---------------------------------------------------------------------------
# text rendering


def _format_poly(coeffs, var) -> str:
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        mag = abs(c)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}{mono}")
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def _format_gf(g: RationalGF, var: str) -> str:
    if g.is_zero():
        return "0"
    num = list(g.numerator)
    low = next(i for i, c in enumerate(num) if c)
    rest = num[low:]
    content = gcd_all(rest)
    if rest[0] < 0:
        content = -content
    rest = [c // content for c in rest]
    const = g.scale * content
    prefix = ""
    if const == -1:
        prefix = "-"
    elif const != 1:
        prefix = str(const) if const.denominator == 1 else f"({const})"
    if low:
        prefix += var if low == 1 else f"{var}^{low}"
    if len(rest) == 1:
        text = prefix if prefix not in ("", "-") else prefix + "1"
    elif prefix:
        text = f"{prefix}({_format_poly(rest, var)})"
    elif g.denominators:
        text = f"({_format_poly(rest, var)})"
    else:
        text = _format_poly(rest, var)
    if not g.denominators:
        return text
    parts = []
    for k in sorted(set(g.denominators)):
        mult = g.denominators.count(k)
        f = f"(1-{var})" if k == 1 else f"(1-{var}^{k})"
        parts.append(f + (f"^{mult}" if mult > 1 else ""))
    return f"{text} / {''.join(parts)}"
