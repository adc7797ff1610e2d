import pytest

from insideout.ehrhart import iop_count_moebius, intersection_poset
from insideout.errors import SymmetryViolation
from insideout.gfun import RationalGF, gf_series, gf_to_qp
from insideout.magic import (
    AFFINE,
    CUBICAL,
    MagicSpec,
    brute_force_count,
    build_magic_iop,
    count_magic,
    line_sum_system,
    magic_polytope,
    oracle_limit,
    run_magic,
    symmetry_factor_check,
    verify_magic,
)
from insideout.polytope import affine_hull

from reference import A3, A3_GF, A3_TEXT, C3, C3_GF, C3_TEXT


@pytest.fixture(scope="module")
def affine_report():
    return run_magic(MagicSpec(3, AFFINE))


@pytest.fixture(scope="module")
def cubical_report():
    return run_magic(MagicSpec(3, CUBICAL))


def as_gf(parts):
    num, dens = parts
    coeffs = [0] * (max(num) + 1)
    for k, v in num.items():
        coeffs[k] = v
    return RationalGF.from_parts(coeffs, dens)


def test_spec_validation():
    with pytest.raises(ValueError):
        MagicSpec(3, "diagonal")
    with pytest.raises(ValueError):
        MagicSpec(1)
    with pytest.raises(ValueError):
        build_magic_iop(MagicSpec(2))


def test_line_system_and_polytopes():
    assert len(line_sum_system(4)) == 10
    _, dim = affine_hull(magic_polytope(MagicSpec(3, AFFINE)).closure())
    assert dim == 2
    _, dim = affine_hull(magic_polytope(MagicSpec(3, CUBICAL)).closure())
    assert dim == 3


def test_two_by_two_squares_do_not_exist():
    for variant in (AFFINE, CUBICAL):
        assert count_magic(MagicSpec(2, variant)).is_zero()
        assert all(brute_force_count(MagicSpec(2, variant), t) == 0 for t in range(1, 12))


def test_affine_quasipolynomial(affine_report):
    assert affine_report.quasipolynomial == A3
    assert affine_report.regions == 16 and affine_report.modulus == 3
    assert affine_report.quasipolynomial.normalized().period == 18


def test_cubical_quasipolynomial(cubical_report):
    assert cubical_report.quasipolynomial == C3
    assert cubical_report.regions == 16 and cubical_report.modulus == 1
    assert cubical_report.quasipolynomial.normalized().period == 12


def test_generating_functions(affine_report, cubical_report):
    assert affine_report.gf == as_gf(A3_GF) and affine_report.gf.format() == A3_TEXT
    assert cubical_report.gf == as_gf(C3_GF) and cubical_report.gf.format() == C3_TEXT
    a = gf_series(affine_report.gf, 21)
    assert (a[15], a[18], a[21]) == (8, 24, 32) and not any(a[:15])
    c = gf_series(cubical_report.gf, 12)
    assert (c[10], c[11]) == (8, 16) and not any(c[:10])
    assert gf_to_qp(affine_report.gf) == A3 and gf_to_qp(cubical_report.gf) == C3


def test_brute_force_small_values():
    spec = MagicSpec(3, AFFINE)
    assert [brute_force_count(spec, t) for t in (12, 15, 16, 18, 21)] == [0, 8, 0, 24, 32]
    spec = MagicSpec(3, CUBICAL)
    assert [brute_force_count(spec, t) for t in (9, 10, 11)] == [0, 8, 16]


def test_brute_force_parallel_split():
    spec = MagicSpec(3, AFFINE)
    assert brute_force_count(spec, 30, jobs=3) == brute_force_count(spec, 30)


def test_pipeline_moebius_and_oracle_agree_on_a_sample():
    for spec, ts in ((MagicSpec(3, AFFINE), (15, 18, 20, 27)), (MagicSpec(3, CUBICAL), (10, 11, 12))):
        q = count_magic(spec)
        iop = build_magic_iop(spec)
        poset = intersection_poset(iop)
        for t in ts:
            assert q(t) == iop_count_moebius(iop, t, poset) == brute_force_count(spec, t)


def test_verify_magic(affine_report):
    checked = verify_magic(affine_report)
    assert len(checked) == 2 * 18


def test_symmetry_check():
    spec = MagicSpec(3, AFFINE)
    assert symmetry_factor_check(spec, [15, 18]) == {15: 8, 18: 24}
    with pytest.raises(SymmetryViolation):
        symmetry_factor_check(spec, [15], counts={15: 12})


def test_oracle_limits():
    assert oracle_limit(MagicSpec(3, AFFINE)) == 60
    assert oracle_limit(MagicSpec(4, CUBICAL)) == 18
    assert oracle_limit(MagicSpec(5, AFFINE)) is None
