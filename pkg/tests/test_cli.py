import csv
import io
import json

from dirhyper.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_verify_small_pass(capsys):
    code, out = run(capsys, "verify", "--max-dim", "4", "--functions", "8")
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "pass"
    assert set(rep) == {"experiment", "params", "seed", "status", "metrics", "violations"}
    assert rep["metrics"]["skipped_cells"]


def test_verify_counterexample(capsys):
    code, out = run(capsys, "verify", "--max-dim", "2", "--functions", "4", "--include-counterexample")
    rep = json.loads(out)
    assert code == 1 and rep["status"] == "violation"
    wit = [v["witness"] for v in rep["violations"] if v["check"] == "counterexample"]
    assert wit and all(w["values"] == [0.0, 1.0] and w["exponent"] == 2.0 for w in wit)


def test_verify_bad_p(capsys):
    code, _ = run(capsys, "verify", "--p", "1.5")
    assert code == 2


def test_unknown_flag(capsys):
    assert main(["verify", "--bogus"]) == 2


def test_byte_identical_across_threads(capsys, monkeypatch):
    args = ("verify", "--max-dim", "3", "--functions", "6", "--format", "csv")
    monkeypatch.setenv("DIRHYPER_THREADS", "1")
    _, a = run(capsys, *args)
    monkeypatch.setenv("DIRHYPER_THREADS", "4")
    _, b = run(capsys, *args)
    assert a == b
    rows = list(csv.DictReader(io.StringIO(a)))
    assert rows and "status" in rows[0]


def test_gap(capsys, tmp_path):
    inst = tmp_path / "inst.json"
    code, out = run(capsys, "gap", "--dim", "10000", "--n", "30", "--eps", "0.01", "--mu", "10",
                    "--seed", "3", "--save-instance", str(inst))
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "pass"
    assert json.loads(inst.read_text())["config"]["dim"] == 10000


def test_gap_degenerate(capsys):
    code, out = run(capsys, "gap", "--dim", "100", "--n", "5", "--eps", "0", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and all(float(r["paired"]) == 0 for r in rows)


def test_gap_single_point(capsys):
    code, out = run(capsys, "gap", "--n", "1")
    assert code == 2 and json.loads(out)["status"] == "error"


def test_shatter(capsys, tmp_path):
    from dirhyper.shatter import make_partition
    path = tmp_path / "part.json"
    path.write_text(json.dumps(make_partition("seeded-hash", 10, m=32, seed=1).to_json()))
    code, out = run(capsys, "shatter", "--dim", "10", "--eps", "0.1", "--mu", "10", "--families", "10",
                    "--k", "5", "--m", "32", "--load-partition", str(path))
    rep = json.loads(out)
    assert code == 0
    assert [p["kind"] for p in rep["metrics"]["cells"][0]["partitions"]] == \
        ["bit-sample", "random-balanced", "seeded-hash", "seeded-hash"]


def test_embed_kl(capsys):
    code, out = run(capsys, "embed", "--generator", "kl", "--a", "0.2", "--b", "0.7", "--dim", "8",
                    "--pm-instances", "200")
    rep = json.loads(out)
    assert code == 0 and rep["metrics"]["embedding"]["kl"]["residual"] <= 1e-9
    assert rep["metrics"]["partial_match"]["inconsistent"] == 0


def test_embed_domain_error(capsys):
    code, _ = run(capsys, "embed", "--generator", "kl", "--a", "-1")
    assert code == 2


def test_mu_l2(capsys):
    code, out = run(capsys, "mu", "--generator", "l2", "--interval=-1,3")
    assert code == 0 and json.loads(out)["metrics"]["l2"]["grid"] == 1.0


def test_mu_itakura_saito_reports_gap(capsys):
    # the grid ratio is scale-free (depends on x/y only) and stays far below the Hessian ratio
    code, out = run(capsys, "mu", "--generator", "itakura-saito", "--interval", "1,4")
    rep = json.loads(out)
    assert code == 1
    assert rep["metrics"]["itakura-saito"]["grid_le_hessian"]


def test_out_file(capsys, tmp_path):
    path = tmp_path / "mu.csv"
    assert main(["mu", "--generator", "l2", "--format", "csv", "--out", str(path)]) == 0
    assert path.read_text().splitlines()[0].startswith("generator,")
