from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from insideout.gfun import (
    STRATEGIES,
    Quasipolynomial,
    RationalGF,
    cyclotomic,
    gf_add,
    gf_series,
    gf_simplify_grouped,
    gf_sum,
    gf_to_qp,
    qp_to_gf,
)


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=6)
quasipolynomials = st.integers(1, 4).flatmap(
    lambda p: st.integers(0, 3).flatmap(
        lambda d: st.lists(st.lists(coeff, min_size=d + 1, max_size=d + 1), min_size=p, max_size=p)
    )
).map(Quasipolynomial)


@settings(max_examples=60, deadline=None)
@given(quasipolynomials, st.integers(0, 3))
def test_gf_series_reproduces_quasipolynomial(q, start):
    g = qp_to_gf(q, start)
    s = gf_series(g, 30)
    assert s == [q(t) if t >= start else 0 for t in range(31)]


@settings(max_examples=60, deadline=None)
@given(quasipolynomials)
def test_gf_to_qp_round_trip(q):
    assert gf_to_qp(qp_to_gf(q)) == q
    assert gf_to_qp(qp_to_gf(q, start=1)) == q


@settings(max_examples=40, deadline=None)
@given(quasipolynomials, quasipolynomials)
def test_gf_addition_matches_series(a, b):
    ga, gb = qp_to_gf(a, 1), qp_to_gf(b, 1)
    total = gf_add(ga, gb)
    assert gf_series(total, 40) == [x + y for x, y in zip(gf_series(ga, 40), gf_series(gb, 40))]
    assert total == qp_to_gf(a + b, 1)


def test_canonical_form_is_unique():
    one = RationalGF.from_parts([1], [1])
    assert RationalGF.from_parts([1, 1], [2]) == one
    assert RationalGF.from_parts([1, 1, 1], [3]) == one
    assert RationalGF.from_parts([2, 2], [2], Fraction(1, 2)) == one
    assert RationalGF.from_parts([1, -1], [1]) == RationalGF.from_parts([1])
    # (1 - z^3) / ((1 - z)(1 - z^2)) does not cancel to powers of (1 - z) alone
    g = RationalGF.from_parts([1, 0, 0, -1], [1, 2])
    assert gf_series(g, 10) == gf_series(RationalGF.from_parts([1, 1, 1], [2]), 10)


def test_scale_holds_rational_content():
    g = qp_to_gf(Quasipolynomial([[Fraction(1, 2)]]))
    assert g.scale == Fraction(1, 2) and all(isinstance(c, int) for c in g.numerator)
    assert gf_series(g, 3) == [Fraction(1, 2)] * 4


@pytest.mark.parametrize("n", range(1, 13))
def test_cyclotomic_factorization(n):
    prod = [1]
    for d in range(1, n + 1):
        if n % d == 0:
            prod = poly_mul(prod, list(cyclotomic(d)))
    target = [1] + [0] * (n - 1) + [-1]
    assert prod == target


def test_strategies_agree_and_report_stats():
    gfs = [qp_to_gf(Quasipolynomial([[k, 1], [0, k]] if k % 2 else [[k, 0, 1]]), 1) for k in range(1, 12)]
    results = set()
    for s in STRATEGIES:
        stats = {}
        results.add(gf_simplify_grouped(gfs, s, stats))
        assert stats["additions"] >= len(gfs) - 1
        assert stats["max_numerator_degree"] >= 0 and stats["max_coefficient_bits"] >= 1
        assert stats["seconds"] >= 0
    assert len(results) == 1
    assert results == {gf_sum(gfs)}
    with pytest.raises(ValueError):
        gf_simplify_grouped(gfs, "random")


def test_rendering():
    assert qp_to_gf(Quasipolynomial([[1]])).format() == "1 / (1-z)"
    assert qp_to_gf(Quasipolynomial([[1, 2, 1]])).format() == "(1 + z) / (1-z)^3"
    assert RationalGF.from_parts([0, 0, -3, -6], [2, 2]).format() == "-3z^2(1 + 2z) / (1-z^2)^2"
    assert RationalGF().format() == "0"


def test_quasipolynomial_operations():
    q = Quasipolynomial([[1, 1], [0, 2]])
    assert q(4) == 5 and q(5) == 10
    assert q.with_period(4).normalized() == q
    assert Quasipolynomial([[1], [1], [1]]).normalized().period == 1
    r = q.restricted_to_multiples(3)
    assert r.period == 6 and [r(t) for t in range(6)] == [1, 0, 0, 6, 0, 0]
    rec = q.reciprocal(1)
    assert rec(3) == -q(-3)
    assert Quasipolynomial.from_record(q.to_record()) == q
    assert (q * 3)(2) == 9 and (q - q).is_zero()
    assert q.format_lines() == ["t = 0 mod 2: t + 1", "t = 1 mod 2: 2*t"]
