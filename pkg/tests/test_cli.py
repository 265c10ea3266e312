import json
import subprocess
import sys

import numpy as np
import pytest

from kbmf.cli import main
from kbmf.io import apply_mask, build_tight_instance, format_matrix, generate_synthetic, read_factors, read_matrix, write_matrix
from kbmf.matrix import BinaryMatrix, boolean_product
from kbmf.objective import frobenius_error, reconstruction_percentage, rho_error
from kbmf.oracle import brute_force_kbmf

from conftest import random_matrix

FAST = ["--greedy-seeds", "5", "--cg-time", "20", "--ip-time", "20"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def load_report(path):
    return json.loads(open(path).read())


@pytest.fixture
def eq1(tmp_path, three_by_three):
    p = tmp_path / "eq1.txt"
    write_matrix(p, three_by_three)
    return p


@pytest.fixture
def j4(tmp_path, j4_minus_i4):
    p = tmp_path / "j4mi4.txt"
    write_matrix(p, j4_minus_i4)
    return p


def test_factorize_compact(capsys, eq1):
    code, out, _ = run(capsys, "factorize", eq1, "--rank", 2, "--method", "cip", *FAST)
    assert code == 0
    summary = json.loads(out)
    assert summary["zeta_f"] == 0 and summary["proven"]
    rep = load_report(summary["report"])
    assert rep["schema_version"] == 1 and rep["method"] == "cip"
    f = read_factors(str(eq1.with_suffix("")) + "_k2")
    assert frobenius_error(read_matrix(eq1), boolean_product(f)) == rep["zeta_f"] == 0


def test_factorize_column_generation_on_j4(capsys, j4, tmp_path):
    code, _, _ = run(capsys, "factorize", j4, "-k", 3, "--method", "cg", "--objective", "frob",
                     "--exact-pricing", "always", "--out", tmp_path / "j4", *FAST)
    assert code == 0
    rep = load_report(tmp_path / "j4_report.json")
    assert rep["lp_value"] == pytest.approx(0, abs=1e-6)
    assert rep["zeta_f"] >= 1
    assert rep["proven"] is False
    assert rep["cg_iterations"] == len(rep["iterations"]) >= 1
    for key in ("dual_bound", "gap", "pool_size", "timings", "status"):
        assert key in rep


def test_report_is_recomputable(capsys, tmp_path, rng):
    X = random_matrix(rng, 5, 4)
    p = tmp_path / "r.txt"
    write_matrix(p, X)
    run(capsys, "factorize", p, "-k", 2, "--objective", "rho", "--rho", "1/2", "--out", tmp_path / "r", *FAST)
    rep = load_report(tmp_path / "r_report.json")
    f = read_factors(tmp_path / "r")
    assert rep["zeta_f"] == frobenius_error(X, boolean_product(f))
    assert rep["zeta_rho"] == str(rho_error(X, f, "1/2"))
    assert rep["objective"] == {"name": "rho", "rho": "1/2"}


def test_factorize_matches_oracle_on_tiny_inputs(capsys, tmp_path, rng):
    for t in range(4):
        X = random_matrix(rng, 4, 4)
        if not X.ones.any():
            continue
        p = tmp_path / f"t{t}.txt"
        write_matrix(p, X)
        run(capsys, "factorize", p, "-k", 2, *FAST)
        rep = load_report(tmp_path / f"t{t}_k2_report.json")
        if rep["proven"]:
            assert rep["zeta_f"] == brute_force_kbmf(X, 2)[0]


def test_kgreedy_method(capsys, eq1):
    code, out, _ = run(capsys, "factorize", eq1, "-k", 2, "--method", "kgreedy", "--greedy-seeds", 3)
    assert code == 0 and json.loads(out)["zeta_f"] == 2


def test_complete_reports_reconstruction(capsys, tmp_path):
    truth = generate_synthetic(12, 12, 3, 50, seed=1)
    masked = apply_mask(truth, 10, seed=1)
    write_matrix(tmp_path / "truth.txt", truth)
    write_matrix(tmp_path / "masked.txt", masked)
    code, _, _ = run(capsys, "complete", tmp_path / "masked.txt", "-k", 3, "--truth", tmp_path / "truth.txt",
                     "--out", tmp_path / "c", *FAST)
    assert code == 0
    rep = load_report(tmp_path / "c_report.json")
    f = read_factors(tmp_path / "c")
    assert rep["missing"] == 14
    assert rep["reconstruction_percentage"] == pytest.approx(float(reconstruction_percentage(truth, f)))
    assert rep["reconstruction_percentage"] >= rep["baseline_zero_percentage"]


def test_complete_without_missing_equals_factorize(capsys, tmp_path, eq1):
    run(capsys, "complete", eq1, "-k", 2, "--out", tmp_path / "a", *FAST)
    run(capsys, "factorize", eq1, "-k", 2, "--out", tmp_path / "b", *FAST)
    a, b = load_report(tmp_path / "a_report.json"), load_report(tmp_path / "b_report.json")
    assert a["zeta_f"] == b["zeta_f"] and a["proven"] == b["proven"]


def test_generate_grid(capsys, tmp_path):
    code, out, _ = run(capsys, "generate", "--grid", "appendix-b", "--out", tmp_path / "grid")
    assert code == 0 and json.loads(out)["written"] == 120
    assert len(list((tmp_path / "grid").glob("*.txt"))) == 120


def test_generate_single_with_mask(capsys, tmp_path):
    code, _, _ = run(capsys, "generate", "--n", 20, "--m", 20, "--kappa", 4, "--sigma", 50, "--mask", 30,
                     "--truth", tmp_path / "t.txt", "--out", tmp_path / "x.txt", "--seed", 3)
    assert code == 0
    X, T = read_matrix(tmp_path / "x.txt"), read_matrix(tmp_path / "t.txt")
    assert int(X.missing.sum()) == 120 and not T.missing.any()
    run(capsys, "generate", "--n", 20, "--m", 20, "--kappa", 4, "--sigma", 50, "--out", tmp_path / "y.txt",
        "--seed", 3)
    assert read_matrix(tmp_path / "y.txt") == T


def test_binarize(capsys, tmp_path):
    (tmp_path / "t.csv").write_text("c,x\nred,1\ngreen,2\nblue,?\nred,4\n")
    (tmp_path / "c.json").write_text(json.dumps({"c": {"type": "categorical"}, "x": {"type": "numeric"}}))
    code, out, _ = run(capsys, "binarize", tmp_path / "t.csv", "--config", tmp_path / "c.json",
                       "--out", tmp_path / "b.txt")
    assert code == 0 and json.loads(out)["shape"] == [4, 5]
    assert read_matrix(tmp_path / "b.txt").missing.sum() == 2


def test_oracle_command(capsys, j4, tmp_path):
    code, out, _ = run(capsys, "oracle", j4, "--isolation", "--boolean-rank", "--rank", 3, "--out", tmp_path / "o")
    rep = json.loads(out)
    assert code == 0
    assert rep["isolation_number"] == 3 and rep["boolean_rank"] == 4
    assert rep["optimum"] == "1" and rep["zeta_f"] == 1
    assert read_factors(tmp_path / "o").k == 3


def test_bench_matches_individual_runs(capsys, tmp_path, rng):
    d = tmp_path / "bench"
    d.mkdir()
    for t in range(5):
        X = random_matrix(rng, 4, 5)
        if not X.ones.any():
            X = BinaryMatrix.from_array(np.eye(4, 5))
        write_matrix(d / f"i{t}.txt", X)
    code, out, _ = run(capsys, "bench", d, "-k", 2, "--methods", "kgreedy,cg", "--report", tmp_path / "b.json",
                       *FAST)
    assert code == 0 and "instance" in out
    rep = load_report(tmp_path / "b.json")
    assert len(rep["rows"]) == 5
    for row in rep["rows"]:
        for method in ("kgreedy", "cg"):
            run(capsys, "factorize", d / f"{row['instance']}.txt", "-k", 2, "--method", method,
                "--out", tmp_path / "single", *FAST)
            assert load_report(tmp_path / "single_report.json")["zeta_f"] == row[method]["zeta_f"]


def test_same_seed_same_iterations(capsys, tmp_path):
    X = generate_synthetic(12, 12, 4, 50, 5, seed=9)
    write_matrix(tmp_path / "s.txt", X)
    reports = []
    for t in range(2):
        run(capsys, "factorize", tmp_path / "s.txt", "-k", 3, "--seed", 4, "--out", tmp_path / f"s{t}", *FAST)
        reports.append(load_report(tmp_path / f"s{t}_report.json"))
    assert reports[0]["cg_iterations"] == reports[1]["cg_iterations"]
    assert reports[0]["pool_size"] == reports[1]["pool_size"]
    assert reports[0]["zeta_f"] == reports[1]["zeta_f"]


def test_errors(capsys, tmp_path, eq1):
    assert run(capsys, "factorize", tmp_path / "missing.txt", "-k", 2)[0] == 2
    assert run(capsys, "factorize", eq1, "-k", 0)[0] == 2
    assert run(capsys, "factorize", eq1, "-k", 2, "--objective", "rho", "--rho", "-1")[0] == 2
    assert run(capsys, "factorize", eq1, "-k", 2, "--objective", "rho", "--rho", "abc")[0] == 2
    assert run(capsys, "factorize", eq1, "-k", 2, "--method", "cip", "--objective", "rho")[0] == 2
    (tmp_path / "bad.txt").write_text("2 2\n10\n0x\n")
    code, _, err = run(capsys, "factorize", tmp_path / "bad.txt", "-k", 1)
    assert code == 2 and "malformed" in err
    assert run(capsys, "oracle", eq1)[0] == 2
    assert run(capsys, "generate", "--out", tmp_path / "g.txt")[0] == 2
    assert run(capsys, "bench", tmp_path / "empty_dir_does_not_exist", "-k", 2)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["factorize", str(eq1), "--rank", "2", "--method", "nmf"])
    assert exc.value.code == 2


def test_weighted_input_is_expanded(capsys, tmp_path):
    w = build_tight_instance(2)
    (tmp_path / "w.txt").write_text(format_matrix(w))
    run(capsys, "factorize", tmp_path / "w.txt", "-k", 2, "--out", tmp_path / "w", *FAST)
    rep = load_report(tmp_path / "w_report.json")
    assert rep["shape"] == [7, 7] and rep["zeta_f"] == 1


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "kbmf", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("kbmf ")
