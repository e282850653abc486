import io
import subprocess
import sys

import pytest

from powerroots.cli import main
from powerroots.formats import format_poly
from powerroots.polycore import from_roots


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def poly_file(tmp_path):
    def make(roots, name="p.txt"):
        f = tmp_path / name
        f.write_text(format_poly(from_roots(roots)))
        return f
    return make


def _fields(line):
    re, im, res, bound, evals = line.split()
    return complex(float(re), float(im)), float(res), bound, int(evals)


def test_roots_three_lines(poly_file):
    code, out, err = run("roots", poly_file([0.2, 0.5, 3]), "--n", 3)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 3
    for line, want in zip(lines, [0.2, 0.5, 3]):
        z, _, bound, evals = _fields(line)
        assert abs(z - want) <= max(float(bound), 1e-12)
        assert evals > 0
    assert "oracle evaluations:" in err


def test_count(poly_file):
    code, out, _ = run("count", poly_file([3, 10]), "--disc", "0 0 5")
    assert (code, out) == (0, "1\n")


def test_dlg(poly_file):
    code, out, _ = run("dlg", poly_file([2, 3]), "--steps", 1)
    assert code == 0
    assert out.splitlines() == ["2", "36 0", "-13 0", "1 0"]


def test_dlg_normalized_prints_scale(poly_file):
    code, out, err = run("dlg", poly_file([2, 3]), "--steps", 2, "--normalize")
    assert code == 0 and "scale 2^" in err


def test_smallest_largest_lehmer(poly_file):
    f = poly_file([0.3, 2, -1.5])
    for verb, want in (("smallest", 0.3), ("largest", 2), ("lehmer", 0.3)):
        code, out, _ = run(verb, f, "--seed", 1)
        assert code == 0
        z, _, _, _ = _fields(out.strip())
        assert abs(z - want) < 2.0 ** -20


def test_lehmer_has_no_bound_field(poly_file):
    _, out, _ = run("lehmer", poly_file([0.3, 2]))
    assert out.split()[3] == "-"


def test_near(poly_file, tmp_path):
    c = tmp_path / "c.txt"
    c.write_text("0.9 0\n3 0  # tie\n5.2 0\n")
    code, out, err = run("near", poly_file([1, 5]), "--centers", c)
    assert code == 0
    lines = out.splitlines()
    assert abs(_fields(lines[0])[0] - 1) < 1e-12
    assert lines[1] == "fail SeparationError"
    assert abs(_fields(lines[2])[0] - 5) < 1e-12


def test_radii(poly_file):
    f = poly_file([1, 4])
    code, out, _ = run("radii", f)
    assert code == 0
    small, large = out.splitlines()
    assert small.split()[0] == "smallest" and small.split()[3] == "coeff"
    assert float(small.split()[1]) == pytest.approx(0.4)
    code, out, _ = run("radii", f, "--method", "bisect", "--tol-bits", 10)
    t, lo, hi, m = out.split()
    assert m == "cauchy_bisect" and float(lo) <= 1 <= float(hi)
    cube = f.parent / "cube.txt"
    cube.write_text("3\n-8\n0\n0\n1\n")
    code, out, _ = run("radii", cube, "--method", "newton")
    assert out.split()[2] == "inf"
    code, out, _ = run("radii", f, "--method", "newton", "--center", "0.5 0")
    assert code == 0 and float(out.split()[2]) >= 0.5


def test_powersums(poly_file):
    f = poly_file([0.5, 3])
    code, out, _ = run("powersums", f, "--h", 2, "--disc", "0 0 1")
    h, re, im, bound = out.split()
    assert int(h) == 2
    assert abs(complex(float(re), float(im)) - 0.25) <= float(bound)
    code, out, _ = run("powersums", f, "--h", 2, "--method", "newton")
    assert float(out.split()[1]) == pytest.approx(9.25)
    assert out.split()[3] == "-"


def test_eigen(tmp_path):
    m = tmp_path / "m.txt"
    m.write_text("2\n0 1\n-6 5\n")
    code, out, _ = run("eigen", m)
    assert code == 0
    small, large = out.splitlines()
    assert abs(_fields(small)[0] - 2) < 1e-10
    assert abs(_fields(large)[0] - 3) < 1e-10


def test_slp_input(tmp_path):
    f = tmp_path / "s.txt"
    # x^2 - 5x + 6 via (x - 2)(x - 3)
    f.write_text("0 in\n1 const 2 0\n2 sub 0 1\n3 const 3 0\n4 sub 0 3\n5 mul 2 4\n")
    code, out, _ = run("smallest", f, "--format", "slp")
    assert code == 0 and abs(_fields(out)[0] - 2) < 1e-10


def test_exit_codes(poly_file, tmp_path):
    f = poly_file([1, -1])
    assert run("smallest", f)[0] == 3
    assert "error: SeparationError" in run("smallest", f)[2]
    assert run("smallest", tmp_path / "missing.txt")[0] == 2
    assert run("frobnicate", f)[0] == 2
    assert run("smallest", f, "--bogus")[0] == 2
    assert run("roots", f, "--n", "-1")[0] == 2
    assert run("count", f, "--disc", "0 0")[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n1\n")
    assert run("smallest", bad)[0] == 2
    assert run("dlg", f, "--steps", 1, "--format", "matrix")[0] == 2


def test_roots_partial_output_on_failure(poly_file):
    code, out, err = run("roots", poly_file([0.5, 2, -2]), "--n", 3)
    assert code == 3
    assert len(out.splitlines()) == 1
    assert "SeparationError" in err


def test_report_details(poly_file):
    _, _, err = run("smallest", poly_file([0.3, 2]), "--report")
    assert "root 1: extremal_small" in err and "evaluations" in err


def test_deterministic_output(poly_file):
    f = poly_file([0.2, 0.5j, -3, 4 + 1j])
    a = run("roots", f, "--n", 4, "--seed", 5)[1]
    b = run("roots", f, "--n", 4, "--seed", 5, "--threads", 4)[1]
    assert a == b


def test_threads_env(poly_file, monkeypatch):
    f = poly_file([0.3, 2])
    monkeypatch.setenv("ROOTS_THREADS", "2")
    assert run("smallest", f)[0] == 0
    monkeypatch.setenv("ROOTS_THREADS", "zero")
    assert run("smallest", f)[0] == 2


def test_module_entry_point(poly_file):
    f = poly_file([3, 10])
    proc = subprocess.run([sys.executable, "-m", "powerroots", "count", str(f), "--disc", "0 0 5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1\n"
