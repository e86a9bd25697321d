import io
import json
import subprocess
import sys

import pytest

from epihorizon.cli import main


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    old = sys.stdout, sys.stderr
    sys.stdout, sys.stderr = out, err
    try:
        code = main(list(argv))
    finally:
        sys.stdout, sys.stderr = old
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def table_file(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("+-+++\n+-+--\n-+---\n+--++\n---++\n")
    return p


@pytest.fixture
def script_file(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"measurements": ["z_B", "x_A", "z_AB", "x_AB", "z_A", "x_B"] * 3}))
    return p


def test_diagonal(table_file):
    code, out, _ = run_cli("diagonal", str(table_file), "--output-format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["diagonal_measurement"] == [-1, 1, 1, -1, -1]
    assert d["matching_row"] is None and d["lawvere"]["contradiction"] is True
    code, out, _ = run_cli("diagonal", str(table_file), "--alpha", "identity")
    assert code == 0 and out


def test_toy_sim_reproducible(script_file):
    a = run_cli("toy-sim", "--script", str(script_file), "--seed", "42", "--output-format", "json")
    b = run_cli("toy-sim", "--script", str(script_file), "--seed", "42", "--output-format", "json")
    assert a[0] == 0 and a[1] == b[1]
    recs = [json.loads(line) for line in a[1].splitlines()]
    assert len(recs) == 18
    assert recs[0]["observable"] == "z_B"
    assert all(len(r["post_state"]["propositions"]) <= 2 for r in recs)


def test_toy_sim_seed_changes_outcomes(script_file):
    outs = {run_cli("toy-sim", "--script", str(script_file), "--seed", str(s), "--output-format", "json")[1]
            for s in range(8)}
    assert len(outs) > 1


def test_bell_correlations():
    code, out, _ = run_cli("bell", "--correlations", "1,1,1,1", "--output-format", "json")
    d = json.loads(out)
    assert code == 0 and d["feasible"] is True and d["witness"][0] == "1"
    code, out, _ = run_cli("bell", "--correlations", "0.7072,0.7072,0.7072,-0.7072", "--output-format", "json")
    assert code == 0 and json.loads(out)["feasible"] is False
    code, out, _ = run_cli("bell", "--correlations", "1,1,1,-1")
    assert code == 0


def test_bell_model(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps(["1/16"] * 16))
    code, out, _ = run_cli("bell", "--model", str(p), "--output-format", "json")
    d = json.loads(out)
    assert code == 0 and d["chsh"]["exact"] == "0"


def test_hardy():
    code, out, _ = run_cli("hardy", "--output-format", "json")
    d = json.loads(out)
    assert code == 0
    assert d["p_H"]["approx_rational"] == "1/12"
    assert abs(d["p_H"]["decimal"] - 1 / 12) < 1e-12
    code, out, _ = run_cli("hardy", "--settings", "0.785,z")
    assert code == 0 and out


@pytest.mark.parametrize("cmd", ["fr", "epr"])
def test_demo_commands(cmd):
    code, out, _ = run_cli(cmd, "--output-format", "json")
    assert code == 0
    json.loads(out)


def test_validate(tmp_path):
    chain = [
        {"id": "i", "context": {"A": "x", "B": "z"}, "premise": "x_A^-",
         "conclusion": "z_B^-|x_A^-", "source": ["x", "z"]},
        {"id": "ii", "context": {"B": "z"}, "premise": "z_B^-",
         "conclusion": "z_A^+|z_B^-", "source": ["z", "z"]},
        {"id": "iii", "context": {"A": "z", "B": "x"}, "premise": "z_A^+",
         "conclusion": "x_B^+|z_A^+", "source": ["z", "x"]},
    ]
    p = tmp_path / "c.json"
    p.write_text(json.dumps(chain))
    code, out, _ = run_cli("validate", "--chain", str(p), "--output-format", "json")
    d = json.loads(out)
    assert code == 0 and d["verdict"]["valid"] is False
    assert d["verdict"]["violation"]["reason"] == "incompatible-contexts"


@pytest.mark.parametrize("argv", [
    ("diagonal", "/nonexistent/table.txt"),
    ("toy-sim", "--script", "/nonexistent.json"),
    ("bell", "--model", "/nonexistent.json"),
    ("bell", "--correlations", "1,2"),
    ("validate", "--chain", "/nonexistent.json"),
])
def test_bad_input_exit_2(argv):
    code, _, err = run_cli(*argv)
    assert code == 2 and err.startswith("error:")


def test_malformed_files_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli("toy-sim", "--script", str(bad))[0] == 2
    assert run_cli("validate", "--chain", str(bad))[0] == 2
    grid = tmp_path / "g.txt"
    grid.write_text("+-\n+x\n")
    assert run_cli("diagonal", str(grid))[0] == 2
    script = tmp_path / "s.json"
    script.write_text(json.dumps({"measurements": ["w_A"]}))
    assert run_cli("toy-sim", "--script", str(script))[0] == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "epihorizon", "epr"], capture_output=True, text=True)
    assert out.returncode == 0 and "x_A" in out.stdout
