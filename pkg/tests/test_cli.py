import json
import subprocess
import sys


from apmub import cli
from apmub.hadamard import dft, sylvester


def run(*argv):
    return cli.main(list(argv))


def test_plan_table_and_json(capsys):
    assert run("plan", "--d", "24") == 0
    out = capsys.readouterr().out
    assert "qef_reshape(q=5,e=1,f=1)" in out and "1.225" in out
    assert run("plan", "--d", "24", "--json") == 0
    data = json.loads(capsys.readouterr().out)
    row = next(p for p in data if p["params"] == {"q": 5, "e": 1, "f": 1})
    assert row["beta_sq"] == {"num": 3, "den": 2} and row["r"] == 5


def test_plan_without_route_exits_2(capsys):
    assert run("plan", "--d", "7") == 2


def test_construct_outputs_are_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("construct", "qef", "--q", "5", "--e", "1", "--f", "1", "--out", str(a)) == 0
    assert run("construct", "qef", "--q", "5", "--e", "1", "--f", "1", "--out", str(b)) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == ["bases.json", "design.json", "manifest.json", "report.json"]
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
    manifest = json.loads((a / "manifest.json").read_text())
    assert manifest["result"]["classification"] == "APMUB"
    assert manifest["parameters"] == {"q": 5, "e": 1, "f": 1, "search_extra": False, "hadamard": "auto"}
    import hashlib

    for n, entry in manifest["outputs"].items():
        assert hashlib.sha256((a / n).read_bytes()).hexdigest() == entry["sha256"]
    assert json.loads((a / "bases.json").read_text())["claim"] == "APMUB"


def test_replay(tmp_path, capsys):
    assert run("construct", "ses", "--s", "5", "--e", "3", "--out", str(tmp_path)) == 0
    assert run("replay", str(tmp_path / "manifest.json")) == 0
    m = json.loads((tmp_path / "manifest.json").read_text())
    m["outputs"]["bases.json"]["sha256"] = "0" * 64
    (tmp_path / "manifest.json").write_text(json.dumps(m))
    assert run("replay", str(tmp_path / "manifest.json")) == 3


def test_construct_ses_truncated(capsys):
    assert run("construct", "ses", "--s", "5", "--e", "3", "--w", "2") == 0
    assert "3 bases" in capsys.readouterr().out
    assert run("construct", "ses", "--s", "5", "--e", "3", "--w", "9") == 2


def test_construct_exit_codes(capsys):
    assert run("construct", "qef", "--q", "7", "--e", "1", "--f", "1", "--hadamard", "real") == 4
    assert run("construct", "qef", "--q", "7", "--e", "2", "--f", "3") == 2
    assert run("construct", "qef", "--q", "6", "--e", "1", "--f", "1") == 2
    assert run("construct", "qef", "--q", "5", "--e", "1", "--f", "1", "--hadamard", "file") == 2


def test_construct_with_hadamard_file(tmp_path, capsys):
    good = tmp_path / "h.json"
    good.write_text(json.dumps(sylvester(2).to_json()))
    assert run("construct", "qef", "--q", "5", "--e", "1", "--f", "1", "--hadamard", "file",
               "--hadamard-file", str(good)) == 0
    bad = sylvester(2).to_json()
    bad["entries"][1][1] = {"zero": False, "num": 0, "den": 1}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    assert run("construct", "qef", "--q", "5", "--e", "1", "--f", "1", "--hadamard", "file",
               "--hadamard-file", str(path)) == 3
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps(dft(3).to_json()))
    assert run("construct", "qef", "--q", "5", "--e", "1", "--f", "1", "--hadamard", "file",
               "--hadamard-file", str(wrong)) == 2


def test_verify_claims(tmp_path, capsys):
    assert run("construct", "ses", "--s", "5", "--e", "0", "--out", str(tmp_path)) == 0
    path = str(tmp_path / "bases.json")
    assert run("verify", path) == 0
    assert run("verify", path, "--expect", "MUB") == 0
    assert run("verify", path, "--expect", "APMUB") == 3
    capsys.readouterr()
    assert run("verify", path, "--json") == 0
    assert json.loads(capsys.readouterr().out)["classification"] == "MUB"


def test_verify_unreadable(tmp_path, capsys):
    p = tmp_path / "x.json"
    p.write_text("not json")
    assert run("verify", str(p)) == 2
    assert run("verify", str(tmp_path / "missing.json")) == 2


def test_weighing(tmp_path, capsys):
    assert run("construct", "qef", "--q", "5", "--e", "1", "--f", "1", "--out", str(tmp_path)) == 0
    capsys.readouterr()
    assert run("weighing", str(tmp_path / "bases.json"), "--out", str(tmp_path / "w.json")) == 0
    out = capsys.readouterr().out
    assert "4 weighing matrices of order 24, weight 16" in out
    assert len(json.loads((tmp_path / "w.json").read_text())) == 4


def test_oracle_mols_hadamard(capsys):
    assert run("oracle", "--d", "7", "--k", "3", "--mu", "1", "--witness") == 0
    assert "T(7,3,1) = 7 [exact]" in capsys.readouterr().out
    assert run("oracle", "--d", "7", "--k", "7", "--mu", "1") == 2
    assert run("mols", "--s", "12") == 0
    assert "2 mutually orthogonal" in capsys.readouterr().out
    assert run("mols", "--s", "1") == 2
    assert run("hadamard", "--k", "12") == 0
    assert "paley_i(GF(11))" in capsys.readouterr().out
    assert run("hadamard", "--k", "6") == 4
    assert run("hadamard", "--k", "6", "--dft") == 0


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "apmub.cli", "mols", "--s", "4"], capture_output=True, text=True)
    assert res.returncode == 0 and "3 mutually orthogonal" in res.stdout
