import json
import subprocess
import sys

import pytest

from conftest import CONE_GRAM, PROBLEMS
from poissym.cli import ProblemFileError, main, parse_problem
from poissym.cli.verify import verify_document


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def machine(capsys, command, name, *extra):
    code, out, _ = run(capsys, command, PROBLEMS / name, "--format", "machine", "--no-timings", *extra)
    return code, json.loads(out)


def cert(doc, kind):
    return next(c for c in doc["certificates"] if c["kind"] == kind)


# -- problem files ---------------------------------------------------------------------

def test_parse_problem_sections():
    pf = parse_problem((PROBLEMS / "double_cone.txt").read_text(), "cone")
    assert pf.ring.variables == ("x1", "x2", "x3")
    assert len(pf.ideal.generators) == 1
    assert pf.poisson is not None


@pytest.mark.parametrize("text, line", [
    ("[ring]\nvariables = x, y\n\n[ideal]\nx^2 +\n", 5),
    ("[ring]\nvariables = x, y\n[ideal]\nx*z\n", 4),
    ("[ring]\nvariables = x, x\n", 2),
    ("[ring]\nvariables = x, y\n[nonsense]\n", 3),
])
def test_problem_errors_carry_line_numbers(text, line):
    with pytest.raises(ProblemFileError) as err:
        parse_problem(text, "t.txt")
    assert err.value.line == line
    assert str(err.value).startswith(f"t.txt:{line}:")


def test_missing_ring_section():
    with pytest.raises(ProblemFileError, match="missing \\[ring\\]"):
        parse_problem("[ideal]\nx\n", "t.txt")


def test_malformed_file_exits_two_with_location(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("[ring]\nvariables = x1, x2\n\n[ideal]\nx1*x2 - x3^2\n")
    code, out, err = run(capsys, "gb", bad)
    assert code == 2
    assert f"{bad}:5:" in err


def test_missing_file_exits_two(tmp_path, capsys):
    code, _, err = run(capsys, "gb", tmp_path / "absent.txt")
    assert code == 2 and "error" in err


# -- commands -------------------------------------------------------------------------------

def test_gb_command(capsys):
    code, doc = machine(capsys, "gb", "double_cone.txt")
    assert code == 0 and doc["status"] == "info"
    assert doc["results"]["groebner basis"] == ["x1*x2 - x3^2"]


def test_gb_order_override(capsys):
    code, doc = machine(capsys, "gb", "double_cone.txt", "--order", "lex")
    assert code == 0 and doc["results"]["order"] == "lex"


def test_gb_elimination_problem(capsys):
    code, doc = machine(capsys, "gb", "graph_ideal.txt")
    assert code == 0
    assert any(g in ("x1*x2 - x3^2", "-x1*x2 + x3^2") for g in doc["results"]["eliminated q, p"])


def test_derivations_command(capsys):
    code, doc = machine(capsys, "derivations", "double_cone.txt")
    assert code == 0
    assert cert(doc, "tangency")["status"] == "pass"
    code, doc = machine(capsys, "derivations", "cusp.txt")
    assert code == 0


def test_derivations_refuse_empty_ideal(capsys):
    code, _, err = run(capsys, "derivations", PROBLEMS / "empty_ideal.txt")
    assert code == 2 and "nonzero ideal" in err


def test_symplectic_double_cone(capsys):
    code, doc = machine(capsys, "symplectic", "double_cone.txt")
    assert code == 0 and doc["status"] == "pass"
    assert doc["results"]["gram"] == CONE_GRAM
    assert doc["results"]["determinant"] == "16*f^2"
    assert doc["results"]["determinant mod ideal"] == "0"
    kinds = [c["kind"] for c in doc["certificates"]]
    assert kinds[0] == "poisson_ideal"
    assert {"descent", "closedness", "delta_ham", "nondegeneracy"} <= set(kinds)


def test_symplectic_free_plane(capsys):
    code, doc = machine(capsys, "symplectic", "free_plane.txt")
    assert code == 0
    assert doc["results"]["gram"] == [["0", "-1"], ["1", "0"]]


def test_symplectic_negative_controls(capsys):
    code, doc = machine(capsys, "symplectic", "double_cone_bad_poisson.txt")
    assert code == 1 and cert(doc, "poisson_ideal")["status"] == "fail"
    code, doc = machine(capsys, "symplectic", "double_cone_bad_gram.txt")
    assert code == 1 and cert(doc, "descent")["status"] == "fail"


def test_quotient_z2(capsys):
    code, doc = machine(capsys, "quotient", "z2_quotient.txt")
    assert code == 0 and doc["status"] == "pass"
    assert cert(doc, "base_change")["status"] == "pass"
    assert doc["results"]["gram in quotient generators"] == CONE_GRAM


def test_quotient_bad_base_change(capsys):
    code, doc = machine(capsys, "quotient", "z2_bad_base_change.txt")
    assert code == 1 and cert(doc, "base_change")["status"] == "fail"


@pytest.mark.parametrize("name", ["trivial_group.txt", "z3_quotient.txt"])
def test_other_quotients_pass(capsys, name):
    code, doc = machine(capsys, "quotient", name)
    assert code == 0 and doc["status"] == "pass"


def test_group_order_cap_exits_three(tmp_path, capsys):
    p = tmp_path / "shear.txt"
    p.write_text("[ring]\nvariables = q, p\n\n[poisson]\ncanonical\n\n[group]\nmatrix = 1 1 ; 0 1\n")
    code, _, err = run(capsys, "quotient", p)
    assert code == 3 and "cap" in err


def test_text_report_and_report_file(tmp_path, capsys):
    code, out, _ = run(capsys, "symplectic", PROBLEMS / "double_cone.txt", "--no-timings")
    assert code == 0 and "status: PASS" in out
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "symplectic", PROBLEMS / "double_cone.txt", "--format", "machine",
                       "--report", target)
    assert code == 0 and str(target) in out
    assert json.loads(target.read_text())["schema"] == "poissym-report/1"


def test_output_is_deterministic(capsys):
    first = run(capsys, "quotient", PROBLEMS / "z2_quotient.txt", "--format", "machine", "--no-timings")[1]
    second = run(capsys, "quotient", PROBLEMS / "z2_quotient.txt", "--format", "machine", "--no-timings")[1]
    assert first == second


def test_invalid_degree_bound(capsys):
    code, _, _ = run(capsys, "quotient", PROBLEMS / "z2_quotient.txt", "--degree-bound", "0")
    assert code == 2


@pytest.mark.parametrize("value, code", [("2", 0), ("zero", 2), ("0", 2)])
def test_thread_variable(monkeypatch, capsys, value, code):
    monkeypatch.setenv("POISSYM_THREADS", value)
    assert run(capsys, "gb", PROBLEMS / "double_cone.txt")[0] == code


# -- verify -----------------------------------------------------------------------------------

def _write_report(tmp_path, capsys, command, name):
    target = tmp_path / f"{name}.json"
    run(capsys, command, PROBLEMS / name, "--format", "machine", "--no-timings", "--report", target)
    return target


def test_verify_accepts_honest_report(tmp_path, capsys):
    path = _write_report(tmp_path, capsys, "symplectic", "double_cone.txt")
    assert run(capsys, "verify", path)[0] == 0


def test_verify_rejects_tampered_residual(tmp_path, capsys):
    path = _write_report(tmp_path, capsys, "symplectic", "double_cone.txt")
    doc = json.loads(path.read_text())
    ev = cert(doc, "closedness")["evidence"][0]
    ev["expression"] = ev["expression"] + " + (x3)"
    path.write_text(json.dumps(doc))
    assert run(capsys, "verify", path)[0] == 1


def test_verify_rejects_failed_status():
    doc = {"schema": "poissym-report/1", "ring": {"variables": ["x"], "weights": [1]}, "ideal": [], "status": "fail",
           "certificates": [{"kind": "k", "status": "fail", "evidence": []}]}
    assert verify_document(doc).code == 1


def test_verify_without_certificates_warns(tmp_path, capsys):
    path = _write_report(tmp_path, capsys, "gb", "double_cone.txt")
    code, out, err = run(capsys, "verify", path)
    assert code == 0
    assert "no certificates" in (out + err).lower()


def test_verify_malformed_report(tmp_path, capsys):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    assert run(capsys, "verify", path)[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "poissym", "gb", str(PROBLEMS / "cusp.txt")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "groebner basis" in proc.stdout
