import json
import subprocess
import sys

import pytest

from threshprod.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from threshprod.graphs import parse_edgelist


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_complete_graph(capsys):
    code, out, _ = run(capsys, "gen", "-n", 4, "-d", 3, "--seed", 1)
    assert code == EXIT_OK
    g = parse_edgelist(out)
    assert g.n == 4 and g.d == 3 and len(g.edges()) == 6
    assert "# seed 1" in out


def test_gen_infeasible_exits_2(capsys):
    code, _, err = run(capsys, "gen", "-n", 5, "-d", 3)
    assert code == EXIT_USAGE and "n*d" in err


def test_product_audit(capsys, tmp_path):
    base = tmp_path / "b.txt"
    assert run(capsys, "gen", "-n", 8, "-d", 2, "--bipartite", "--seed", 3, "-o", base)[0] == EXIT_OK
    code, out, _ = run(capsys, "product", base, "--kind", "sgp", "-k", 2, "-t", 1, "-o", tmp_path / "p.txt")
    report = json.loads(out)
    assert code == EXIT_OK and report["match"] and report["audited_degree"] == report["formula_degree"] == 12
    p = parse_edgelist((tmp_path / "p.txt").read_text())
    assert p.n == 64 and p.d == 12


def test_product_on_irregular_toy_base(capsys, tmp_path):
    base = tmp_path / "toy.txt"
    base.write_text("4 - bipartite\n0 2\n")
    code, out, err = run(capsys, "product", base, "--kind", "sgp", "-k", 2, "-t", 1)
    assert code == EXIT_OK
    assert out.splitlines()[2] == "16 -"
    report = json.loads(err)
    assert report["vertices"] == 16 and report["formula_degree"] is None


def test_product_cap_exits_3(capsys, tmp_path):
    base = tmp_path / "b.txt"
    run(capsys, "gen", "-n", 10, "-d", 3, "-o", base)
    code, _, err = run(capsys, "product", base, "--kind", "gp", "-k", 3, "-t", 1, "--cap", 100)
    assert code == EXIT_BUDGET and "cap" in err


def test_spectrum_formula_vs_oracle(capsys):
    code, out, _ = run(capsys, "spectrum", "-n", 6, "-d", 2, "--seed", 1, "--kind", "gp", "-k", 2, "-t", 1)
    report = json.loads(out)
    assert code == EXIT_OK and report["match"] and report["N"] == 36


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", "-n", 10, "-d", 3, "--seed", 4, "-k", 2, "-t", 1)
    report = json.loads(out)
    assert code == EXIT_OK
    assert report["alpha"] == "3/2" and report["degree_formula"] == report["degree_audited"] == 51
    assert all(report["flags"].values())


def test_verify_single_point(capsys):
    code, out, err = run(capsys, "verify", "spectrum", "--kind", "gp", "-n", 8, "-d", 3, "-k", 2, "-t", 1, "--seed", 2)
    report = json.loads(out)
    assert code == EXIT_OK and report["summary"]["passed"]
    assert [c["name"] for c in report["checks"]] == ["spectrum.gp"]
    assert "PASS" in err


def test_verify_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# degree audit\nsuite = degrees\nn = 6\nd = 2\nk = 2\nseed = 3\n")
    code, out, _ = run(capsys, "verify", "--config", cfg, "--seed", 5)
    report = json.loads(out)
    assert code == EXIT_OK
    assert report["config"]["suite"] == "degrees" and report["config"]["n"] == 6
    assert report["seed"] == 5


def test_verify_bad_config(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert run(capsys, "verify", "--config", cfg)[0] == EXIT_USAGE
    assert run(capsys, "verify", "spectrum", "-k", 2, "-t", 3)[0] == EXIT_USAGE


def test_verify_csv_rows(capsys, tmp_path):
    csv = tmp_path / "rows.csv"
    code, _, _ = run(capsys, "verify", "mixing", "--kind", "gp", "-n", 8, "-d", 2, "-k", 1, "-t", 1,
                     "--samples", 20, "--seed", 1, "--csv", csv)
    lines = csv.read_text().splitlines()
    assert code == EXIT_OK and lines[0].startswith("kind,n,d,k,t,seed,size_s")
    assert len(lines) > 20 * 3


def test_verify_is_deterministic(capsys):
    argv = ("verify", "bounds", "-n", 8, "-k", 2, "--seed", 4)
    first = run(capsys, *argv)
    assert first == run(capsys, *argv)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "threshprod", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "0.1.0" in res.stdout


def test_verify_exit_code_on_failure(capsys, monkeypatch):
    import threshprod.verify as verify_mod

    def broken(ws):
        res = verify_mod.CheckResult("broken", "always fails")
        res.record(False, reason="forced")
        return res

    monkeypatch.setitem(verify_mod.SUITE_CHECKS, "degrees", broken)
    assert run(capsys, "verify", "degrees", "-n", 6, "-d", 2, "-k", 1)[0] == EXIT_FAIL
