import json

import pytest

from cjwiretap.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sdof_fig2(capsys):
    code, out, _ = run(capsys, "sdof", "--fig2", "4")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "nt,nr,ne,nc,sdof_num,sdof_den"
    vals = [tuple(map(int, l.split(",")[-2:])) for l in lines[1:]]
    assert vals == [(0, 1), (1, 1), (2, 1), (2, 1), (2, 1), (5, 2), (3, 1), (7, 2), (4, 1)]


def test_sdof_ranges(capsys):
    code, out, _ = run(capsys, "sdof", "--nt", "4", "--nr", "4", "--ne", "4", "--nc", "0..8")
    assert code == 0 and len(out.strip().splitlines()) == 10
    code, out, _ = run(capsys, "sdof", "--nt", "5", "--nr", "2", "--ne", "3", "--nc", "0")
    assert out.strip().splitlines()[1] == "5,2,3,0,2,1"


def test_sdof_bad_ranges(capsys):
    assert run(capsys, "sdof", "--nc", "5..2")[0] == 2
    assert run(capsys, "sdof", "--nt", "0")[0] == 2
    assert run(capsys, "sdof", "--nt", "x")[0] == 2


def test_sdof_json(capsys):
    code, out, _ = run(capsys, "sdof", "--nt", "1", "--nr", "1", "--ne", "1", "--nc", "1", "--format", "json")
    assert json.loads(out) == [{"nt": 1, "nr": 1, "ne": 1, "nc": 1, "sdof_num": 1, "sdof_den": 2}]


def test_verify_filtered(capsys):
    code, out, _ = run(capsys, "verify", "--cases", "sym6", "--seeds", "5")
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    assert {r["case"] for r in rep["records"]} == {"Sym6"}
    keys = {"case", "seed", "align_residual", "invis_residual", "rx_rank", "expected_rank"}
    assert keys <= set(rep["records"][0])


def test_verify_broken_tolerance(capsys):
    code, out, err = run(capsys, "verify", "--cases", "sym1,genII", "--seeds", "3", "--rank-tol", "0.5")
    assert code == 1
    assert "failing checks" in err
    assert json.loads(out)["failing_checks"]


def test_verify_unknown_case(capsys):
    assert run(capsys, "verify", "--cases", "nope")[0] == 2


def test_slope_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["slope", "--nt", "4", "--nr", "4", "--ne", "2", "--nc", "1", "--p-decades", "2..10"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["case"] == "Sym1" and (rep["theory_num"], rep["theory_den"]) == (3, 1)
    assert abs(rep["slope"] - 3) < 0.1


def test_slope_unwritable(capsys):
    code, _, err = run(capsys, "slope", "--nt", "4", "--nr", "4", "--ne", "2", "--nc", "1",
                       "--out", "/nonexistent-dir/x.json")
    assert code == 2


def test_simulate_csv(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code = main(["simulate", "--nt", "3", "--nr", "3", "--ne", "3", "--nc", "2", "--power-grid", "1e3,1e5",
                 "--trials", "20", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "case,seed,P,trials,joint_errors,stream_errors,dmin"
    assert len(lines) == 3 and lines[1].startswith("Sym3,")


def test_simulate_needs_structured(capsys):
    assert run(capsys, "simulate", "--nt", "4", "--nr", "4", "--ne", "2", "--nc", "1")[0] == 2


def test_config_file_and_override(tmp_path, capsys):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"nt": "4", "nr": "4", "ne": "4", "nc": "0..8"}))
    code, out, _ = run(capsys, "sdof", "--config", str(conf))
    assert code == 0 and len(out.strip().splitlines()) == 10
    code, out, _ = run(capsys, "sdof", "--config", str(conf), "--nc", "2")
    assert out.strip().splitlines()[1] == "4,4,4,2,2,1"


def test_bad_power_grid(capsys):
    assert run(capsys, "slope", "--power-grid", "10,5")[0] == 2
    assert run(capsys, "slope", "--p-decades", "5..1")[0] == 2


def test_usage_error_exit(capsys):
    assert run(capsys, "nosuch")[0] == 2
