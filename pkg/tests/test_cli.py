import json
import subprocess
import sys

import pytest

from insideout import ehrhart
from insideout.cli import main

from conftest import fixture_path
from reference import A3, A3_TEXT, C3_TEXT
from insideout.gfun import Quasipolynomial


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_magic_affine_text(capsys):
    code, out, _ = run(capsys, "magic", "--n", "3", "--variant", "affine")
    assert code == 0
    assert A3_TEXT in out
    assert "regions: 16" in out
    assert "t = 0 mod 18: 2/9*t^2 - 32/9*t + 16" in out
    assert "timings:" in out


def test_magic_cubical_series(capsys):
    code, out, _ = run(capsys, "magic", "--n", "3", "--variant", "cubical", "--series", "12")
    assert code == 0
    assert C3_TEXT in out
    series = next(line for line in out.splitlines() if line.startswith("series:"))
    assert series.endswith("c3(10)=8, c3(11)=16")


def test_magic_structured_record(capsys):
    code, out, _ = run(capsys, "magic", "--n", "3", "--format", "structured", "--series", "22")
    rec = json.loads(out)
    assert code == 0 and rec["regions"] == 16 and rec["modulus"] == 3
    assert Quasipolynomial.from_record(rec["quasipolynomial"]) == A3
    assert rec["gf"]["text"] == A3_TEXT
    assert rec["series"][15] == 8 and rec["series"][21] == 32
    assert "timings" not in rec
    code, out, _ = run(capsys, "magic", "--n", "3", "--format", "structured", "--timings")
    assert set(json.loads(out)["timings"]) == {"build", "regions", "ehrhart", "gf"}


def test_magic_verify(capsys):
    code, out, _ = run(capsys, "magic", "--n", "3", "--verify")
    assert code == 0 and "verification: passed" in out


def test_magic_refuses_long_runs(capsys):
    code, _, err = run(capsys, "magic", "--n", "4")
    assert code == 2 and "--allow-long" in err
    code, _, err = run(capsys, "magic", "--n", "3", "--regions-only")
    assert code == 2


def test_checkpointed_magic_completes(capsys, tmp_path):
    path = str(tmp_path / "ck.jsonl")
    code, out, _ = run(capsys, "magic", "--n", "3", "--checkpoint", path, "--batch", "3", "--max-regions", "7")
    assert code == 0 and "complete: no" in out
    code, out, _ = run(capsys, "magic", "--n", "3", "--checkpoint", path, "--batch", "3", "--format", "structured")
    rec = json.loads(out)
    assert rec["checkpoint"]["complete"] and rec["checkpoint"]["regions"] == 16
    assert Quasipolynomial.from_record(rec["checkpoint"]["partial_sum"]) == A3
    assert rec["gf"]["text"] == A3_TEXT
    # a different configuration must not reuse the file
    code, _, err = run(capsys, "magic", "--n", "3", "--checkpoint", path, "--batch", "4")
    assert code == 2 and "different configuration" in err


def test_torn_checkpoint_line_is_discarded(capsys, tmp_path):
    path = tmp_path / "ck.jsonl"
    args = ["magic", "--n", "3", "--checkpoint", str(path), "--batch", "4", "--regions-only"]
    run(capsys, *args, "--max-regions", "8")
    with open(path, "a") as fh:
        fh.write('{"kind":"batch","ind')
    code, out, _ = run(capsys, *args)
    assert code == 0 and "regions: 16 (resumed after 8)" in out
    lines = path.read_text().splitlines()
    assert all(json.loads(line) for line in lines)
    fresh = tmp_path / "fresh.jsonl"
    run(capsys, "magic", "--n", "3", "--checkpoint", str(fresh), "--batch", "4", "--regions-only")
    assert fresh.read_text() == path.read_text()


def test_ehrhart_fixtures(capsys):
    code, out, _ = run(capsys, "ehrhart", fixture_path("unit_square.hrep"), "--series", "4")
    assert code == 0
    assert "  t^2 + 2*t + 1" in out
    assert "(1 + z) / (1-z)^3" in out
    assert "L(3)=16" in out
    code, out, _ = run(capsys, "ehrhart", fixture_path("semimagic3.hrep"))
    assert "1/8*t^4 + 3/4*t^3 + 15/8*t^2 + 9/4*t + 1" in out
    code, out, _ = run(capsys, "ehrhart", fixture_path("magic_diagonals3.hrep"), "--verify")
    assert "t = 0 mod 3: 2/9*t^2 + 2/3*t + 1" in out and "t = 1,2 mod 3: 0" in out
    code, out, _ = run(capsys, "ehrhart", fixture_path("open_unit_square.hrep"), "--format", "structured")
    rec = json.loads(out)
    assert rec["closed"] is False and rec["gf_start"] == 1
    assert rec["quasipolynomial"]["constituents"] == [["1", "-2", "1"]]


def test_ehrhart_errors(capsys, tmp_path, monkeypatch):
    bad = tmp_path / "bad.hrep"
    bad.write_text("2 1 0\n0 1 q 0\n")
    code, _, err = run(capsys, "ehrhart", str(bad))
    assert code == 2 and "line 2" in err and "ParseError" in err
    unbounded = tmp_path / "ray.hrep"
    unbounded.write_text("1 1 0\n0 1 0\n")
    code, _, err = run(capsys, "ehrhart", str(unbounded))
    assert code == 3 and "UnboundedPolyhedron" in err
    empty = tmp_path / "empty.hrep"
    empty.write_text("1 2 0\n1 1 0\n0 -1 0\n")
    code, _, err = run(capsys, "ehrhart", str(empty))
    assert code == 3 and "EmptyPolyhedron" in err
    code, _, err = run(capsys, "ehrhart", str(tmp_path / "missing.hrep"))
    assert code == 2


def test_ehrhart_verification_failure_exit_code(capsys, tmp_path, monkeypatch):
    seg = tmp_path / "seg.hrep"
    seg.write_text("1 2 0\n0 1 0\n-1 -2 0\n")  # 0 <= x <= 1/2
    ehrhart.ehrhart_quasipolynomial.cache_clear()
    monkeypatch.setattr(ehrhart, "period_bound", lambda _: 1)
    code, _, err = run(capsys, "ehrhart", str(seg))
    ehrhart.ehrhart_quasipolynomial.cache_clear()
    assert code == 4 and "VerificationFailure" in err


def test_regions_command(capsys):
    square = fixture_path("unit_square.hrep")
    code, out, _ = run(capsys, "regions", square, fixture_path("square_cross.hyperplanes"), "--show")
    assert code == 0 and out.startswith("regions: 4")
    assert [l for l in out.splitlines() if l.startswith("region ")] == [
        "region 00:", "region 01:", "region 10:", "region 11:"
    ]
    code, out, _ = run(capsys, "regions", square, fixture_path("square_edge.hyperplanes"))
    assert out.startswith("regions: 1")
    code, out, _ = run(
        capsys, "regions", fixture_path("magic3_affine.hrep"), fixture_path("magic3_affine.hyperplanes"),
        "--format", "structured",
    )
    rec = json.loads(out)
    assert rec["regions"] == 16 and rec["hyperplanes"] == 8


def test_regions_degenerate(capsys):
    code, _, err = run(
        capsys, "regions", fixture_path("magic3_affine.hrep"), fixture_path("magic3_degenerate.hyperplanes")
    )
    assert code == 3 and "DegenerateArrangement" in err and "1 1 1 1 0 0 0 0 0 0" in err


def test_brute_command(capsys):
    code, out, _ = run(capsys, "brute", "--n", "3", "--variant", "affine", "--t", "15")
    assert code == 0 and out.splitlines()[0] == "8"
    code, out, _ = run(capsys, "brute", "--n", "3", "--variant", "affine", "--t", "16")
    assert out.splitlines()[0] == "0"
    code, _, err = run(capsys, "brute", "--n", "4", "--variant", "cubical", "--t", "40")
    assert code == 2 and "t <= 18" in err


def test_argument_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["magic", "--n", "3", "--variant", "pandiagonal"])
    assert info.value.code == 2


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "insideout", "brute", "--n", "3", "--t", "18"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0 and res.stdout.splitlines()[0] == "24"
