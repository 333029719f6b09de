import io
import json

import pytest

from dipolar.cli import EXIT_INPUT, EXIT_OK, EXIT_RESOLUTION, run


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(autouse=True)
def fixed_clock(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


@pytest.fixture
def config_file(tmp_path):
    doc = {"dim": 3, "poles": [[0, 0, 0], [2, 0, 0]], "strengths": [0.5, 0.5],
           "moments": [[0, 0, 1], [0, 1, 0]]}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc))
    return p


def test_mu1_constant_report():
    code, out, _ = call(["mu1", "--dim", "4", "--kind", "constant", "--level", "2"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["report"]["mu1"] == pytest.approx(-2.0)
    m = doc["manifest"]
    assert m["command"] == "mu1" and m["timestamp"] == "2023-11-14T22:13:20Z"
    assert len(m["input_digest"]) == 64


def test_reports_are_byte_identical():
    argv = ["mu1", "--dim", "3", "--kind", "dipole", "--strength", "1.5"]
    assert call(argv)[1] == call(argv)[1]


def test_sweep_as_csv():
    code, out, _ = call(["mu1", "--dim", "3", "--kind", "dipole", "--sweep", "0:2:3",
                         "--output", "csv"])
    lines = out.strip().splitlines()
    assert code == EXIT_OK and lines[0] == "scale,mu1" and len(lines) == 4
    assert float(lines[1].split(",")[1]) == 0.0


def test_lambda_command():
    code, out, _ = call(["lambda", "--dim", "3", "--basis-size", "60"])
    rep = json.loads(out)["report"]
    assert code == EXIT_OK and 0 < rep["lambda"] < 4


def test_potential_document(tmp_path):
    p = tmp_path / "h.json"
    p.write_text(json.dumps({"kind": "dipole", "params": {"strength": 1.0}}))
    code, out, _ = call(["mu1", "--config", str(p), "--dim", "4"])
    assert code == EXIT_OK
    code, _, err = call(["mu1", "--config", str(p)])
    assert code == EXIT_INPUT and "dim" in err


def test_classify_and_certify(config_file):
    code, out, _ = call(["classify", "--config", str(config_file)])
    rep = json.loads(out)["report"]
    assert code == EXIT_OK and rep["in_class_V"]
    code, out, _ = call(["certify", "--config", str(config_file), "--samples", "800"])
    rep = json.loads(out)["report"]
    assert code == EXIT_OK and rep["verdict"] == "pass" and rep["mu_lower_bound"] > 0


def test_binding_command(config_file):
    code, out, _ = call(["binding", "--config", str(config_file), "--config-b", str(config_file)])
    rep = json.loads(out)["report"]
    assert code == EXIT_OK and set(rep) == {"necessary", "sufficient"}


def test_witness_and_counterexample():
    code, out, _ = call(["witness", "--dim", "3", "--level", "0"])
    assert code == EXIT_OK and json.loads(out)["report"]["l2_finite"]
    code, out, _ = call(["counterexample", "--dim", "4", "--lam", "0.2", "--mu", "10"])
    rep = json.loads(out)["report"]
    assert code == EXIT_OK and rep["verdict"] == "counterexample" and rep["best_ratio"] > 1


@pytest.mark.parametrize("argv", [
    ["counterexample", "--dim", "4", "--lam", "0.05"],
    ["mu1"],
    ["classify"],
    ["classify", "--config", "/nonexistent.json"],
    ["lambda", "--dim", "3", "--output", "csv"],
    ["mu1", "--dim", "3", "--sweep", "1:2"],
    ["nosuchcommand"],
])
def test_bad_input_exit_code(argv):
    assert call(argv)[0] == EXIT_INPUT


def test_empty_configuration(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"dim": 3, "poles": []}))
    assert call(["classify", "--config", str(p)])[0] == EXIT_INPUT
    p.write_text("{not json")
    assert call(["classify", "--config", str(p)])[0] == EXIT_INPUT


def test_resolution_failure_exit_code():
    code, _, err = call(["lambda", "--dim", "3", "--basis-size", "6", "--tolerance", "1e-14"])
    assert code == EXIT_RESOLUTION and "resolution" in err


def test_non_finite_values_are_strings():
    from dipolar.cli import render_json

    assert json.loads(render_json({"x": float("inf")}))["x"] == "inf"
