import io
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from wdirichlet.cli import main
from wdirichlet.series import read_series


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    report = {}
    for line in out.getvalue().splitlines():
        k, _, v = line.partition(" = ")
        report[k] = v
    return code, report, out.getvalue()


@pytest.fixture
def files(tmp_path):
    (tmp_path / "r2.txt").write_text("# mode exact\n1 1 2\n2 1 1\n")
    (tmp_path / "delta.txt").write_text("# mode exact\n1 1 1\n")
    (tmp_path / "nonunit.txt").write_text("# mode exact\n2 1 1\n")
    (tmp_path / "minus.txt").write_text("# mode exact\n1 1 1\n2 1 -1\n")
    return tmp_path


def test_invert_two_plus(files):
    out = files / "inv.txt"
    code, rep, _ = run("invert", "--in", str(files / "r2.txt"), "--box", "2^20", "--out", str(out), "--verify")
    assert code == 0 and rep["verify"] == "ok" and rep["verify.residual"] == "0"
    b, meta = read_series(out)
    assert b.to_dict() == {(2**n, 1): Fraction((-1) ** n, 2 ** (n + 1)) for n in range(21)}
    assert rep["l1_norm"].startswith(str(1 - Fraction(1, 2**21)))


def test_invert_delta_and_nonunit(files, capsys):
    out = files / "d.txt"
    assert run("invert", "--in", str(files / "delta.txt"), "--out", str(out))[0] == 0
    assert read_series(out)[0].to_dict() == {(1, 1): 1}
    code, _, _ = run("invert", "--in", str(files / "nonunit.txt"))
    assert code == 1
    assert "not a unit" in capsys.readouterr().err


def test_check_weight_exit_codes(capsys):
    code, rep, _ = run("check-weight", "--weight", "const:1", "--require", "admissible")
    assert code == 0 and rep["admissible"] == "admissible"
    code, rep, _ = run("check-weight", "--weight", "axispow:1,0", "--require", "admissible")
    assert code == 2 and rep["growth.rho1"] == "2.0" and rep["required_failed"] == "admissible"
    code, rep, _ = run("check-weight", "--weight", "twoadic")
    assert code == 0 and rep["almost_monotone"] == "monotone-with-constant" and float(rep["almost_monotone.K"]) >= 1
    code, _, _ = run("check-weight", "--weight", "cnst:1")
    assert code == 1 and ":1:1:" in capsys.readouterr().err


def test_eval_on_boundary(files):
    t = math.pi / math.log(2)
    code, rep, _ = run("eval", "--in", str(files / "r2.txt"), "--point", f"{t}j,0")
    assert code == 0 and abs(float(rep["abs"]) - 1) <= 1e-9
    code, rep, _ = run("eval", "--in", str(files / "r2.txt"), "--char", "point:0,0")
    assert float(rep["abs"]) == 3


def test_norm(files):
    code, rep, _ = run("norm", "--in", str(files / "r2.txt"), "--weight", "twoadic")
    assert code == 0 and rep["norm"] == "8"
    code, rep, _ = run("norm", "--in", str(files / "r2.txt"), "--p", "1/2")
    assert float(rep["norm"]) == pytest.approx(1 + math.sqrt(2))


def test_spectral_min_and_reproducibility(files):
    args = ("spectral-min", "--in", str(files / "r2.txt"), "--seed", "11", "--weight", "mfpi:R1=3")
    first = run(*args)
    assert first[0] == 0 and first[2] == run(*args)[2]
    assert "config.seed = 11" in first[2]
    code, rep, _ = run("spectral-min", "--in", str(files / "r2.txt"))
    assert abs(float(rep["min_abs"]) - 1) < 1e-3
    code, rep, _ = run("spectral-min", "--in", str(files / "minus.txt"), "--require", "bounded-away")
    assert code == 2 and rep["bounded_away"] == "false"


def test_growth(files):
    code, rep, _ = run("growth", "--in", str(files / "r2.txt"), "--weight", "twoadic", "--depths", "2^1..2^40")
    assert code == 0 and rep["sum.1099511627776"] == "41" and rep["classification"] == "divergent-evidence"
    code, _, _ = run("growth", "--in", str(files / "r2.txt"), "--weight", "twoadic", "--require", "bounded")
    assert code == 2


def test_funcalc_matches_invert(files):
    inv = files / "inv64.txt"
    run("invert", "--in", str(files / "r2.txt"), "--box", "64", "--mode", "float", "--out", str(inv))
    code, rep, _ = run("funcalc", "--in", str(files / "r2.txt"), "--phi", "reciprocal", "--nodes", "256",
                       "--compare", str(inv), "--tol", "1e-6")
    assert code == 0 and float(rep["compare.max_entry_diff"]) <= 1e-6
    code, _, _ = run("funcalc", "--in", str(files / "r2.txt"), "--phi", "reciprocal", "--radius", "3")
    assert code == 1


def test_shrink_weight(files):
    code, rep, _ = run("shrink-weight", "--in", str(files / "r2.txt"), "--weight", "mfpi:R1=3", "--threads", "4")
    assert code == 0 and rep["best_r"] == "1.9" and rep["nu"] == "mfpi:R1=1.9"
    assert rep["config.threads"] == "4"
    assert rep["candidate.2.5"].startswith("divergent-evidence")


def test_usage_errors_exit_1(capsys):
    assert run("invert", "--bogus")[0] == 1
    assert run("nosuch")[0] == 1
    assert run("invert", "--box", "0")[0] == 1
    assert "error" in capsys.readouterr().err


def test_console_script(files):
    proc = subprocess.run([sys.executable, "-m", "wdirichlet.cli", "invert", "--in", str(files / "delta.txt")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "entries = 1" in proc.stdout
