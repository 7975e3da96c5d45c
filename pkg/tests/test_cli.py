import json

import numpy as np
import pytest

from teamlmi import Partition, TeamProblem, gamma_bar, lift_dynamic, multistage_dynamic, witsenhausen
from teamlmi.cli import main
from teamlmi.fileio import dump_json, load_problem, problem_to_dict


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", ["witsenhausen", "witsenhausen-team", "multistage-dynamic"])
def test_example_round_trip(tmp_path, capsys, name):
    path = tmp_path / "p.json"
    code, _, _ = run(capsys, "example", name, "--k2", "0.3", "--output", str(path))
    assert code == 0
    prob = load_problem(path)
    assert problem_to_dict(prob) == json.loads(path.read_text())


def test_floats_survive_round_trip(tmp_path):
    prob = witsenhausen(1 / 3)
    path = tmp_path / "w.json"
    dump_json(problem_to_dict(prob), path)
    assert load_problem(path) == prob


def test_solve(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, err = run(capsys, "solve", "--example", "witsenhausen", "--k2", "1", "--output", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["status"] == "ok"
    assert doc["gamma_star"] == pytest.approx(0.381966, abs=1e-3)
    assert doc["oracle_gamma"] <= doc["gamma_star"] + 1e-3
    assert "gamma_star" in err


def test_solve_lifted_dynamic_reports_ceiling(capsys):
    # u-only cost: zero gain gives ratio 0
    code, out, _ = run(capsys, "solve", "--example", "multistage-dynamic", "--m", "3", "--quiet")
    assert code == 0
    doc = json.loads(out)
    assert doc["gamma_star"] == 0.0
    assert doc["gamma_bar"] == pytest.approx(gamma_bar(lift_dynamic(multistage_dynamic(3))))


def test_assumption_violation_exit(capsys):
    code, out, err = run(capsys, "solve", "--example", "multistage", "--m", "3")
    assert code == 2
    doc = json.loads(out)
    assert doc["status"] == "assumption_violation"
    assert doc["gamma_bar"] == pytest.approx(1.0)
    assert "gamma_bar" in err


def test_bad_input_exit(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"kind": "team", "partition": {"m": [1], "p": [1]},')
    code, _, err = run(capsys, "solve", str(path))
    assert code == 1
    assert "line 1" in err


def test_invalid_problem_exit(tmp_path, capsys):
    prob = TeamProblem([[1.0]], [[2.0]], [[1.0]], [[0.0]], [[0.0]], Partition.scalar(1))
    path = tmp_path / "p.json"
    dump_json(problem_to_dict(prob), path)
    code, _, err = run(capsys, "solve", str(path))
    assert code == 1
    assert "not PSD" in err


def test_ill_posed_exit(tmp_path, capsys):
    prob = TeamProblem(np.eye(1), np.zeros((1, 2)), np.eye(2), [[0.0, 1.0], [1.0, 0.0]], np.ones((2, 1)),
                       Partition.scalar(2))
    ppath, gpath = tmp_path / "p.json", tmp_path / "k.json"
    dump_json(problem_to_dict(prob), ppath)
    gpath.write_text(json.dumps({"blocks": [[[1.0]], [[1.0]]]}))
    code, out, _ = run(capsys, "verify", str(ppath), "--gain", str(gpath))
    assert code == 3
    assert json.loads(out)["status"] == "ill_posed"


def test_verify_team(tmp_path, capsys):
    gpath = tmp_path / "k.json"
    gpath.write_text(json.dumps({"blocks": [[[-0.4]], [[0.4]]]}))
    code, out, _ = run(capsys, "verify", "--example", "witsenhausen-team", "--k2", "1", "--gain", str(gpath))
    assert code == 0
    doc = json.loads(out)
    assert set(doc["witness"]) >= {"w", "v", "ratio"}
    assert doc["lmi_margin"] is None or doc["lmi_margin"] <= 1e-9


def test_gamma_bar_infinite(tmp_path, capsys):
    prob = TeamProblem(np.diag([2.0, 1.0]), np.zeros((2, 2)), np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)),
                       Partition.scalar(2))
    path = tmp_path / "p.json"
    dump_json(problem_to_dict(prob), path)
    code, out, _ = run(capsys, "gamma-bar", str(path))
    assert code == 0
    assert out.strip() == "inf"


def test_gamma_bar_value(capsys):
    code, out, _ = run(capsys, "gamma-bar", "--example", "witsenhausen", "--k2", "0.1")
    assert code == 0
    assert float(out) == pytest.approx(0.1, rel=1e-12)


def test_lift(capsys):
    code, out, _ = run(capsys, "lift", "--example", "multistage-dynamic", "--m", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "team"
    np.testing.assert_array_equal(doc["D"], np.eye(3, k=-1))


def test_lift_needs_dynamic_problem(capsys):
    code, _, err = run(capsys, "lift", "--example", "witsenhausen")
    assert code == 1
    assert "dynamic" in err


def test_missing_source(capsys):
    code, _, err = run(capsys, "gamma-bar")
    assert code == 1
