import csv
import io
import json
import subprocess
import sys

import pytest

from cokstat.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_simulate_csv(capsys):
    code, out = run(capsys, "simulate", "--n", "10", "--a", "4", "--trials", "200", "--seed", "3")
    assert code == 0
    table = rows(out.out)
    assert list(table[0]) == ["group_label", "count", "frequency", "ci_low", "ci_high"]
    assert sum(int(r["count"]) for r in table) == 200
    assert table[0]["group_label"] == "1"


def test_simulate_is_reproducible_across_threads(tmp_path):
    paths = [tmp_path / "one.csv", tmp_path / "four.csv"]
    for path, threads in zip(paths, ("1", "4")):
        assert main(["simulate", "--n", "12", "--a", "9", "--trials", "300", "--seed", "5",
                     "--threads", threads, "--out", str(path)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_config_file_with_override(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("n = 8\na = 3\ntrials = 50\ndist = bernoulli:0.6\n")
    code, out = run(capsys, "simulate", "--config", str(cfg), "--trials", "70", "--format", "json")
    data = json.loads(out.out)
    assert code == 0 and data["config"]["trials"] == 70 and data["config"]["dist"] == "bernoulli:0.6"


def test_rank_csv(capsys):
    code, out = run(capsys, "rank", "--n", "30", "--a", "2", "--trials", "300")
    table = rows(out.out)
    assert list(table[0]) == ["k", "frequency", "theoretical", "ci_low", "ci_high"]
    assert float(table[0]["theoretical"]) == pytest.approx(0.288788, abs=1e-6)


def test_rank_composite_modulus_fails(capsys):
    code, out = run(capsys, "rank", "--n", "5", "--a", "6", "--trials", "10")
    assert code == 2 and "prime" in out.err


def test_unbalanced_distribution_fails(capsys):
    code, out = run(capsys, "simulate", "--n", "5", "--a", "2", "--dist", "table:1=1")
    assert code == 2


def test_moment(capsys):
    code, out = run(capsys, "moment", "--n", "10", "--a", "2", "--trials", "100", "--group", "1")
    r = rows(out.out)[0]
    assert float(r["mean"]) == 1.0 and float(r["expected"]) == 1.0


def test_universality(capsys):
    code, out = run(capsys, "universality", "--n", "20", "--a", "2", "--trials", "200",
                    "--dist-b", "bernoulli:0.8", "--rank", "--format", "json")
    data = json.loads(out.out)
    assert code == 0 and 0 <= data["tv_ab"] <= 1 and data["config_b"]["dist"] == "bernoulli:0.8"


def test_cl_table(capsys):
    code, out = run(capsys, "cl-table", "--a", "2", "--cutoff", "2")
    table = rows(out.out)
    assert [r["group_label"] for r in table] == ["1", "2:[1]", "tail_mass"]
    assert float(table[-1]["cumulative"]) == pytest.approx(1.0)
    code, out = run(capsys, "cl-table", "--a", "6", "--tensor")
    assert rows(out.out)[0]["group_label"] == "1"


def test_rank_table(capsys):
    code, out = run(capsys, "rank-table", "--a", "2", "--kmax", "3")
    table = rows(out.out)
    assert float(table[1]["probability"]) == pytest.approx(0.577576, abs=1e-6)


def test_solve_moments_from_file(tmp_path, capsys):
    path = tmp_path / "moments.csv"
    path.write_text("group_label,moment\n1,1\n2:[1],1/2\n")
    code, out = run(capsys, "solve-moments", "--in", str(path), "--a", "2", "--rank", "1", "--format", "json")
    data = json.loads(out.out)
    assert {r["group_label"]: r["probability"] for r in data["rows"]} == {"1": "1/2", "2:[1]": "1/2"}
    code, out = run(capsys, "solve-moments", "--a", "2", "--rank", "1")
    assert code == 0
    path.write_text("group_label,moment\n1,1\n")
    code, out = run(capsys, "solve-moments", "--in", str(path), "--a", "2", "--rank", "1")
    assert code == 2


def test_verify_bounds(tmp_path):
    out = tmp_path / "report.json"
    code = main(["verify-bounds", "--a", "2", "--n", "4", "--dist", "bernoulli:0.9", "--out", str(out)])
    report = json.loads(out.read_text())
    assert code == 0 and report["passed"]
    assert {r["lemma"] for r in report["reports"]} >= {"character-sum", "code-column", "depth-column",
                                                       "depth-census"}


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cokstat", "rank-table", "--a", "3", "--kmax", "1"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.splitlines()[0] == "k,probability,cumulative"
