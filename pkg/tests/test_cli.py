import json
from pathlib import Path

import pytest

from fconn.cli import main
from fconn.quantumex import EXAMPLE_IDS

INPUTS = Path(__file__).resolve().parents[1] / "scripts" / "inputs"


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_example_cubic(capsys):
    code, out = run_json(capsys, "example", "--id", "cubic_surface_block", "--analyze")
    assert code == 0
    blocks = {b["lambda"]: b["monodromy_exponents"] for b in out["analysis"]["exp_type"]["blocks"]}
    assert blocks["-6"] == ["1/3 mod 1", "2/3 mod 1"]


def test_gm_mirror(capsys):
    code, out = run_json(capsys, "gm", "--input", str(INPUTS / "w_p1mirror.json"))
    assert code == 0 and sorted(out["critical_values"]) == ["-2", "2"]
    assert all(sorted(s["monodromy_eigenvalues"]) == ["-1", "1"] for s in out["singularities"])


def test_analyze_zero(capsys):
    code, out = run_json(capsys, "analyze", "--input", str(INPUTS / "zero.json"))
    assert code == 0 and out["summary"] == "nonsingular; trivial monodromy"


def test_analyze_p1_file(capsys):
    code, out = run_json(capsys, "analyze", "--input", str(INPUTS / "p1_quantum.json"))
    assert code == 0
    assert sorted(b["lambda"] for b in out["exp_type"]["blocks"]) == ["-2", "2"]


def test_other_verbs(capsys):
    code, out = run_json(capsys, "newton", "--input", str(INPUTS / "p1_operator.json"))
    assert code == 0 and [s["slope"] for s in out["newton"]["slopes"]] == ["0"]
    code, out = run_json(capsys, "fl-local", "--input", str(INPUTS / "local_model.json"))
    assert code == 0 and out["flanders"]["nonzero_match"]
    code, out = run_json(capsys, "toy", "--input", str(INPUTS / "toy_p2_line.json"), "--analyze")
    assert code == 0 and out["dmodule"]["passed"] and out["analysis"]["jordan_bound"]["holds"]
    code, out = run_json(capsys, "cyclic-check", "--dga", "ground_field")
    assert code == 0 and out["passed"]


def test_text_format(capsys):
    code, out = run(capsys, "--format", "text", "example", "--id", "p1")
    assert code == 0 and out.startswith("id: p1")


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops", encoding="utf-8")
    code, out = run_json(capsys, "analyze", "--input", str(bad))
    assert code == 2 and out["error"] == "ParseError"


def test_wrong_shape(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"var": "q", "matrix": [["0", "0"], ["0"]]}), encoding="utf-8")
    code, out = run_json(capsys, "analyze", "--input", str(bad))
    assert code == 2 and out["error"] == "SchemaError"


def test_unknown_example(capsys):
    code, out = run_json(capsys, "example", "--id", "nope")
    assert code == 2 and out["error"] == "SchemaError"


def test_order_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("FCONN_ORDER", "7")
    code, out = run_json(capsys, "example", "--id", "p1", "--analyze")
    assert out["analysis"]["input"]["order"] == 7
    code, out = run_json(capsys, "example", "--id", "p1", "--analyze", "--order", "9")
    assert out["analysis"]["input"]["order"] == 9


@pytest.mark.parametrize("eid", EXAMPLE_IDS)
def test_reports_are_byte_identical(capsys, eid):
    _, a = run(capsys, "example", "--id", eid, "--analyze")
    _, b = run(capsys, "example", "--id", eid, "--analyze")
    assert a == b
    json.loads(a)
