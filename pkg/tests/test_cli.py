import json
import os

import pytest

from kgraphlab.cli import SCHEMA, run

from cli_cases import A, B, C, CASES, CORRUPT, REL_C, run_cli
from conftest import FIXTURES


@pytest.mark.parametrize("name", sorted(CASES))
def test_command_runs(name, capsys):
    argv, code = CASES[name]
    assert run(argv) == code
    out = capsys.readouterr()
    doc = json.loads(out.out)
    assert doc["schema"] == SCHEMA and doc["command"] == name
    assert doc["pass"] is True
    assert out.err.startswith(f"kgraphlab {name}: ok")


def test_mce_result(capsys):
    run(CASES["mce"][0])
    assert json.loads(capsys.readouterr().out)["result"] == ["e.f"]


def test_verify_tck_residual_table(capsys):
    run(CASES["verify-tck"][0])
    doc = json.loads(capsys.readouterr().out)
    names = [r["relation"] for r in doc["relations"]]
    assert names == ["TCK1", "TCK2", "TCK3", "TCK4", "adjoint-product"]
    assert all(r["max_residual"] <= 1e-10 for r in doc["relations"])


def test_corrupt_graph_exit_2(capsys):
    assert run(["validate", "--graph", CORRUPT]) == 2
    doc = json.loads(capsys.readouterr().out)
    assert doc["error"] == "NonBijectiveSquare" and doc["line"] == 8


@pytest.mark.parametrize("argv,error", [
    (["bogus", "--graph", A], "UnknownCommand"),
    (["mce", "--graph", A, "--mu", "e"], "UnknownCommand"),
    (["paths", "--graph", A], "ParseError"),
    (["paths", "--graph", A, "--bound", "1"], "ParseError"),
    (["verify-tck", "--graph", A, "--bound", "1,1", "--margin", "2,2"], "BoundTooSmall"),
    (["cocycle-check", "--graph", A, "--bound", "1,1", "--cocycle", "phase=1"], "ParseError"),
    (["mce", "--graph", A, "--mu", "q", "--nu", "e"], "UnknownPath"),
    (["quotient", "--graph", C, "--hereditary", "u"], "NotHereditary"),
    (["validate", "--graph", str(FIXTURES / "missing.kg")], "OSError"),
])
def test_errors_exit_2(argv, error, capsys):
    assert run(argv) == 2
    assert json.loads(capsys.readouterr().out)["error"] == error


def test_verification_failure_exit_1(capsys):
    argv = ["cocycle-check", "--graph", A, "--bound", "2,2", "--cocycle",
            f"table={FIXTURES / 'fault_cocycle_a.json'}"]
    assert run(argv) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["pass"] is False and doc["failure"] == "cocycle-identity"


def test_ideals_and_witness(capsys):
    run(["ideals", "--graph", C, "--relations", REL_C, "--bound", "1"])
    doc = json.loads(capsys.readouterr().out)
    assert [p["H"] for p in doc["pairs"]] == [[], ["u", "v"]]
    run(CASES["witness"][0])
    doc = json.loads(capsys.readouterr().out)
    assert doc["witness"]["degree"] == [0] and doc["norms"] == [[[0], 1.0]]


def test_output_file(tmp_path, capsys):
    dest = tmp_path / "out.json"
    assert run(CASES["pi"][0] + ["--output", str(dest)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(dest.read_text())["size"] == 3


def test_subprocess_entry_point_and_threads():
    env = dict(os.environ, KGRAPHLAB_THREADS="3")
    one = run_cli(CASES["ideals"][0])
    three = run_cli(CASES["ideals"][0], env=env)
    assert one.returncode == 0 and one.stdout == three.stdout
    bad = run_cli(["validate", "--graph", CORRUPT])
    assert bad.returncode == 2 and "line 8" in bad.stderr
