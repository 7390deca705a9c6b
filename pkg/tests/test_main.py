import argparse
import io
import json

import numpy as np
import pytest

from src.data.storage import dumps
from src.main import EXIT_CHECK_FAILED, EXIT_INPUT_ERROR, EXIT_OK, parse_dims, parse_orders, run


def _write(tmp_path, name, A):
    path = tmp_path / name
    path.write_text(dumps(A))
    return str(path)


def test_parse_dims():
    assert parse_dims("2..4") == [2, 3, 4]
    assert parse_dims("5") == [5]
    for bad in ("4..2", "0..3", "a..b", "x"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_dims(bad)


def test_parse_orders():
    assert parse_orders("1,2,3") == [1, 2, 3]
    for bad in ("", "0", "1,x"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_orders(bad)


def test_analyze_json(tmp_path, capsys, symmetry):
    path = _write(tmp_path, "s.json", symmetry)
    assert run(["analyze", path, "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"]["condition_holds"] is True
    assert data["input"]["rows"] == 2


def test_analyze_text(tmp_path, capsys, nilpotent):
    path = _write(tmp_path, "n.json", nilpotent)
    assert run(["analyze", path]) == EXIT_OK
    assert "Verdict" in capsys.readouterr().out


def test_example_piped_into_analyze(capsys, monkeypatch):
    assert run(["example", "rmk41", "--half-dim", "2"]) == EXIT_OK
    matrix = capsys.readouterr().out
    assert json.loads(matrix)["rows"] == 4
    monkeypatch.setattr("sys.stdin", io.StringIO(matrix))
    assert run(["analyze", "-", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["polar"]["t_u"][0][0] == [1.0, 0.0]
    assert data["verdict"]["condition_holds"] is False


def test_gen_writes_a_verified_matrix(tmp_path, capsys):
    out = tmp_path / "u.csv"
    assert run(["gen", "unitary", "--dim", "3", "--seed", "5", "-o", str(out)]) == EXIT_OK
    assert len(out.read_text().splitlines()) == 3
    assert run(["gen", "m_quasi_isometry", "--dim", "4", "--m", "3", "--seed", "1"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["cols"] == 4


def test_gen_rejects_bad_rank(capsys):
    assert run(["gen", "partial_isometry", "--dim", "2", "--rank", "5"]) == EXIT_INPUT_ERROR
    assert capsys.readouterr().err.startswith("error:")


def test_decompose(tmp_path, capsys, nilpotent):
    path = _write(tmp_path, "n.json", nilpotent)
    assert run(["decompose", path, "--which", "max-pi", "--format", "json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["dims"]["M"] == 2


def test_decompose_needs_contraction(tmp_path, capsys):
    path = _write(tmp_path, "big.json", 2 * np.eye(2))
    assert run(["decompose", path, "--which", "max-pi"]) == EXIT_INPUT_ERROR
    assert "NotContraction" in capsys.readouterr().err


def test_decompose_needs_condition(tmp_path, capsys, nilpotent):
    path = _write(tmp_path, "n.json", nilpotent)
    assert run(["decompose", path, "--which", "rmk41"]) == EXIT_INPUT_ERROR
    assert "ConditionFails" in capsys.readouterr().err


def test_verify_and_fuzz(capsys):
    assert run(["verify", "polar41", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["passes"] == 4 and data["dims"] == [1, 2, 3, 4]
    assert run(["fuzz", "--trials", "4", "--dims", "2..3", "--format", "json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["suite"] == "fuzz"


def test_failing_suite_exit_code(capsys, monkeypatch):
    from src.analysis import suites

    monkeypatch.setitem(suites.SUITES, "polar41", lambda trial, dim, seed, tol: (False, {}, "forced"))
    assert run(["verify", "polar41", "--trials", "2"]) == EXIT_CHECK_FAILED
    assert "FAIL" in capsys.readouterr().out


def test_search(capsys):
    args = ["search", "--dims", "2..3", "--restarts", "2", "--iters", "20", "--delta", "0.5", "--format", "json"]
    assert run(args) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert [r["dim"] for r in data["runs"]] == [2, 3]
    assert data["timings"] is None


def test_bad_inputs(tmp_path, capsys):
    assert run(["analyze", str(tmp_path / "missing.json")]) == EXIT_INPUT_ERROR
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    assert run(["analyze", str(bad)]) == EXIT_INPUT_ERROR
    rect = tmp_path / "rect.csv"
    rect.write_text("1,2\n")
    assert run(["analyze", str(rect)]) == EXIT_INPUT_ERROR
    err = capsys.readouterr().err
    assert err.count("error:") == 3


def test_tolerance_flags_and_config(tmp_path, capsys, symmetry):
    path = _write(tmp_path, "s.json", symmetry)
    config = tmp_path / "tol.yaml"
    config.write_text("psd: 1e-6\n")
    assert run(["analyze", path, "--config", str(config), "--tol-eq", "1e-7", "--format", "json"]) == EXIT_OK
    tolerances = json.loads(capsys.readouterr().out)["tolerances"]
    assert tolerances["psd"] == 1e-6 and tolerances["eq"] == 1e-7
    assert run(["analyze", path, "--tol-rank", "-1"]) == EXIT_INPUT_ERROR


def test_unknown_command_exits_through_argparse():
    with pytest.raises(SystemExit) as info:
        run(["nope"])
    assert info.value.code == 2
