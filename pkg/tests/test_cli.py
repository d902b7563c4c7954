import csv
import io
import json

import pytest
from click.testing import CliRunner

from modtr.cli import main


@pytest.fixture
def run():
    runner = CliRunner()

    def go(*args, env=None):
        return runner.invoke(main, list(args), env=env, catch_exceptions=False)

    return go


def test_volumes_torus_row(run):
    r = run("volumes", "--kernel", "mirzakhani", "--max-complexity", "3")
    assert r.exit_code == 0
    data = json.loads(r.output)
    assert {"g": 1, "n": 1, "poly": "1/12*pi^2 + 1/48*L1^2"} in data["volumes"]


def test_volumes_kontsevich_pants(run):
    r = run("volumes", "--kernel", "kontsevich", "--gn", "0,3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(r.output)))
    assert [(x["num"], x["den"], x["pi2"]) for x in rows] == [("1", "1", "0")]


def test_empty_range(run):
    r = run("volumes", "--max-complexity", "0", "--format", "csv")
    assert r.exit_code == 0
    assert r.output.strip() == "g,n,d,pi2,num,den,value"


def test_numeric(run):
    r = run("volumes", "--gn", "1,1", "--numeric")
    vals = [x["value"] for x in json.loads(r.output)["rows"]]
    assert vals[0] == pytest.approx(3.14159265358979 ** 2 / 12)


def test_deterministic(run, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("volumes", "--max-complexity", "3", "--output", str(a))
    run("volumes", "--max-complexity", "3", "--output", str(b), env={"MODULI_THREADS": "1"})
    assert a.read_bytes() == b.read_bytes()


def test_psi(run):
    r = run("psi", "--gn", "1,1")
    assert json.loads(r.output)["rows"] == [{"g": 1, "n": 1, "d": [1], "num": "1", "den": "24"}]


def test_graphs(run):
    rows = json.loads(run("graphs", "--gn", "1,1").output)["rows"]
    assert sorted(x["aut"] for x in rows) == [1, 2]


def test_verlinde(run):
    r = run("verlinde", "--data", "su2_k1.json", "--gn", "0,3", "--labels", "0,0,0")
    assert json.loads(r.output)["rows"][0]["rank"] == 1


def test_verlinde_all_labels(run):
    rows = json.loads(run("verlinde", "--level", "2", "--gn", "1,1").output)["rows"]
    assert [x["rank"] for x in rows] == [3, 0, 1]


def test_mcshane(run):
    data = json.loads(run("mcshane", "--fn", "1.0,0.0", "--cutoff", "25").output)
    assert abs(data["sum"] - 1) < 1e-3
    assert json.loads(run("mcshane", "--cutoff", "0").output)["sum"] == 0
    assert run("mcshane", "--kernel", "kontsevich", "--cutoff", "10").exit_code == 0


def test_twist(run):
    r = run("twist", "--gn", "1,1")
    rows = json.loads(r.output)["rows"]
    assert any(x.get("sym") == {"u_0_0": 1} and x["num"] == "1" and x["den"] == "2" for x in rows)
    g = json.loads(run("twist", "--gn", "1,2", "--method", "graphs").output)["rows"]
    t = json.loads(run("twist", "--gn", "1,2").output)["rows"]
    assert g == t


def test_verify_passes(run):
    r = run("verify", "--max-complexity", "3")
    assert r.exit_code == 0, r.output
    assert json.loads(r.output)["passed"]


def test_verify_airy_kontsevich(run):
    r = run("verify", "--suite", "airy", "--kernel", "kontsevich")
    assert r.exit_code == 0


def test_verify_mutated_tensor_file(run, tmp_path):
    path = tmp_path / "t.json"
    assert run("airy-check", "--export", str(path)).exit_code == 0
    data = json.loads(path.read_text())
    entry = next(e for e in data["B"] if e["index"] == [1, 0, 0])
    entry["value"][0]["num"] = str(int(entry["value"][0]["num"]) + 1)
    path.write_text(json.dumps(data))
    r = CliRunner().invoke(main, ["verify", "--tensors", str(path)])
    assert r.exit_code == 1
    report = json.loads(r.stdout)
    assert not report["passed"] and report["suites"]["airy"]["failing"]


def test_exit_codes():
    runner = CliRunner()
    assert runner.invoke(main, ["volumes", "--gn", "0,2"]).exit_code == 2
    assert runner.invoke(main, ["volumes", "--kernel", "bogus"]).exit_code == 2
    assert runner.invoke(main, ["volumes", "--gn", "1,1"], env={"MODULI_THREADS": "zero"}).exit_code == 2
    assert runner.invoke(main, ["airy-check", "--cap", "2"]).exit_code == 3


def test_config_then_flags(tmp_path, run):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kernel": "kontsevich", "gn": ["1,1"], "format": "csv"}))
    r = run("volumes", "--config", str(cfg))
    assert "1,1,[1],0,1,48" in r.output and "pi2" in r.output.splitlines()[0]
    r = run("volumes", "--config", str(cfg), "--kernel", "mirzakhani")
    assert "1,1,[0],1,1,12" in r.output


def test_bad_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text("[1, 2]")
    assert CliRunner().invoke(main, ["volumes", "--config", str(cfg)]).exit_code == 2
