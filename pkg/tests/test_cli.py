import json
import subprocess
import sys

import numpy as np
import pytest

from ree_css.boundary import gen_singular_boundary_state, psi_from_phi
from ree_css.cli import EXIT_DOMAIN, EXIT_OK, EXIT_VERIFY, run
from ree_css.io import load_matrix, save_matrix


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip().startswith("{") else None
    return code, report, out.err


def test_example_sigma_then_hyperplane(tmp_path, capsys):
    s = tmp_path / "s.json"
    code, report, _ = call(capsys, "example-sigma", "--out", s)
    assert code == EXIT_OK and report["trace"] == pytest.approx(1.0, abs=1e-12)
    code, report, _ = call(capsys, "hyperplane", "--sigma", s, "--out", tmp_path / "p.json")
    assert code == EXIT_OK
    assert report["kernel_dimension"] == 2
    assert abs(report["tr_phi_sigma"]) <= 1e-10
    assert report["tolerances"]["rank"] == 1e-10


def test_hyperplane_with_explicit_coefficients(tmp_path, capsys):
    s = tmp_path / "s.json"
    call(capsys, "example-sigma", "--out", s)
    coeffs = tmp_path / "c.json"
    coeffs.write_text(json.dumps({"re": [1, 0], "im": [0, 1]}))
    code, report, _ = call(capsys, "hyperplane", "--sigma", s, "--coeffs", coeffs)
    assert code == EXIT_OK
    np.testing.assert_allclose(report["coefficients"]["im"], [0, 1 / np.sqrt(2)])
    coeffs.write_text("[0, 0]")
    code, _, err = call(capsys, "hyperplane", "--sigma", s, "--coeffs", coeffs)
    assert code == EXIT_DOMAIN and "zero" in err


def test_full_pipeline(tmp_path, capsys):
    s, p, r = tmp_path / "s.json", tmp_path / "p.json", tmp_path / "r.json"
    assert call(capsys, "gen-boundary", "--m", 2, "--k", 1, "--seed", 3, "--out", s)[0] == EXIT_OK
    assert call(capsys, "hyperplane", "--sigma", s, "--out", p)[0] == EXIT_OK
    code, report, _ = call(capsys, "inverse-css", "--sigma", s, "--phi", p, "--x-frac", 0.5, "--out", r)
    assert code == EXIT_OK
    assert report["x"] == pytest.approx(0.5 * report["x_max"])
    assert report["lambda_min_rho_pt"] < 0
    code, report_v, _ = call(capsys, "verify-css", "--rho", r, "--sigma", s)
    assert code == EXIT_OK and report_v["passed"]
    assert report_v["tolerances"] == {"condition": 1e-7, "anchor": 1e-9}
    code, report_r, _ = call(capsys, "ree", "--rho", r, "--sigma", s)
    assert code == EXIT_OK
    assert report_r["ree"] == pytest.approx(report["ree_nats"], abs=1e-12)
    code, report_b, _ = call(capsys, "ree", "--rho", r, "--sigma", s, "--bits")
    assert report_b["ree"] == pytest.approx(report["ree_bits"], abs=1e-12)
    assert report_b["units"] == "bits"


def test_inverse_css_endpoint(tmp_path, capsys):
    s, p = tmp_path / "s.json", tmp_path / "p.json"
    call(capsys, "gen-boundary", "--m", 2, "--k", 1, "--seed", 1, "--out", s)
    call(capsys, "hyperplane", "--sigma", s, "--out", p)
    code, _, err = call(capsys, "inverse-css", "--sigma", s, "--phi", p, "--x", 0)
    assert code == EXIT_DOMAIN and "--allow-endpoint" in err
    out = tmp_path / "r.json"
    code, report, _ = call(capsys, "inverse-css", "--sigma", s, "--phi", p, "--x", 0, "--allow-endpoint", "--out", out)
    assert code == EXIT_OK and "ree_nats" not in report
    np.testing.assert_array_equal(load_matrix(out)[0], load_matrix(s)[0])
    code, _, err = call(capsys, "inverse-css", "--sigma", s, "--phi", p, "--x", 100)
    assert code == EXIT_DOMAIN and "x_max" in err


def test_inverse_css_singular_psi(tmp_path, capsys):
    sigma, h = gen_singular_boundary_state((2, 3), seed=5)
    s, q = tmp_path / "s.json", tmp_path / "psi.json"
    save_matrix(s, sigma, (2, 3))
    save_matrix(q, psi_from_phi(h).psi, (2, 3))
    code, report, _ = call(capsys, "inverse-css", "--sigma", s, "--psi", q, "--x-frac", 1.0)
    assert code == EXIT_OK
    assert report["branch"] == "singular"
    assert report["x_max"] <= 1.0


def test_verify_css_fails_off_the_boundary(tmp_path, capsys, bell_singlet):
    r, s = tmp_path / "r.json", tmp_path / "s.json"
    save_matrix(r, 0.9 * bell_singlet + 0.1 * np.eye(4) / 4, (2, 2))
    save_matrix(s, np.eye(4) / 4, (2, 2))
    code, report, err = call(capsys, "verify-css", "--rho", r, "--sigma", s, "--restarts", 20)
    assert code == EXIT_VERIFY
    assert not report["passed"] and report["max_product_value"] > 1


def test_oracle_css_bell_in_bits(tmp_path, capsys, bell_singlet):
    r, out, rep = tmp_path / "r.json", tmp_path / "s.json", tmp_path / "rep.json"
    save_matrix(r, bell_singlet, (2, 2))
    code, report, _ = call(capsys, "oracle-css", "--rho", r, "--restarts", 2, "--bits", "--out", out, "--report", rep)
    assert code == EXIT_OK
    assert report["objective"] == pytest.approx(1.0, abs=1e-4)
    assert report["units"] == "bits"
    assert json.loads(rep.read_text())["tolerances"]["tol_step"] == 1e-11
    assert load_matrix(out)[0].shape == (4, 4)


def test_oracle_css_non_convergence_exit_code(tmp_path, capsys):
    s, p, r = tmp_path / "s.json", tmp_path / "p.json", tmp_path / "r.json"
    call(capsys, "gen-boundary", "--m", 2, "--k", 1, "--seed", 3, "--out", s)
    call(capsys, "hyperplane", "--sigma", s, "--out", p)
    call(capsys, "inverse-css", "--sigma", s, "--phi", p, "--x-frac", 0.5, "--out", r)
    code, report, _ = call(capsys, "oracle-css", "--rho", r, "--restarts", 1, "--max-iters", 1)
    assert code == EXIT_VERIFY and not report["converged"]


def test_appendix_suite_command(tmp_path, capsys):
    rep = tmp_path / "a.json"
    code, report, _ = call(capsys, "appendix-suite", "--samples", 20, "--n", 3, "--seed", 1, "--report", rep)
    assert code == EXIT_OK and report["passed"]
    assert json.loads(rep.read_text())["violations"] == 0


def test_input_errors_map_to_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, _, err = call(capsys, "hyperplane", "--sigma", bad)
    assert code == EXIT_DOMAIN and "malformed JSON" in err
    code, _, err = call(capsys, "hyperplane", "--sigma", tmp_path / "missing.json")
    assert code == EXIT_DOMAIN
    assert call(capsys, "gen-boundary", "--m", 2)[0] == EXIT_DOMAIN
    assert call(capsys, "gen-boundary", "--m", 2, "--k", 5)[0] == EXIT_DOMAIN
    assert call(capsys, "no-such-command")[0] == EXIT_DOMAIN


def test_dimension_mismatch_is_named(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    save_matrix(a, np.eye(4) / 4, (2, 2))
    save_matrix(b, np.eye(6) / 6, (2, 3))
    code, _, err = call(capsys, "ree", "--rho", a, "--sigma", b)
    assert code == EXIT_DOMAIN and "dimension mismatch" in err


def test_gen_boundary_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    call(capsys, "gen-boundary", "--m", 3, "--k", 2, "--seed", 8, "--out", a)
    call(capsys, "gen-boundary", "--m", 3, "--k", 2, "--seed", 8, "--out", b)
    assert a.read_text() == b.read_text()


def test_text_format(capsys):
    code = run(["--format", "text", "example-sigma"])
    out = capsys.readouterr().out
    assert code == EXIT_OK and "trace: " in out


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ree_css", "example-sigma", "--out", str(tmp_path / "s.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert (tmp_path / "s.json").exists()
