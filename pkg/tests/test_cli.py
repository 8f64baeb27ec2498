import json
import subprocess
import sys
from pathlib import Path

import pytest

from canext.cli import main

DATA = Path(__file__).resolve().parents[1] / "src" / "canext" / "data"
WORKED = str(DATA / "worked2x2.json")
NO_CONTACT = str(DATA / "no_contact.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "-i", WORKED)
    assert code == 0
    assert json.loads(out) == {"valid": True, "n": 2, "d": 2}


def test_validate_invalid_model(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"T": [[[0, 1], [1, 0]]]}))
    code, out, _ = run(capsys, "validate", "-i", str(bad))
    assert code == 2
    body = json.loads(out)
    assert body["valid"] is False and "T1" in body["error"]


def test_malformed_input(tmp_path, capsys):
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    code, out, err = run(capsys, "validate", "-i", str(junk))
    assert code == 1 and out == "" and "canext: error" in err
    code, _, err = run(capsys, "equations", "-i", WORKED, "--h", "0,1,2")
    assert code == 1 and "length" in err
    code, _, err = run(capsys, "equations", "-i", str(tmp_path / "missing.json"), "--h", "0,1")
    assert code == 1
    assert run(capsys, "nonsense")[0] == 1


def test_log(capsys):
    code, out, _ = run(capsys, "log", "-i", str(DATA / "jordan3.json"))
    assert code == 0
    N = json.loads(out)["N"]
    assert N[1] == [["0", "-1", "1/2"], ["0", "0", "-1"], ["0", "0", "0"]]


def test_equations_worked(capsys):
    code, out, _ = run(capsys, "equations", "-i", WORKED, "--h", "0,1")
    assert code == 0
    body = json.loads(out)
    assert [p["text"] for p in body["p"]] == ["-v1"]
    assert [e["text"] for e in body["eqA"]] == ["0", "v2 - 1"]
    assert len(body["eqB"]) == 1
    assert body["S"] == [[1, 1]] and body["k"] == 1 and body["contact"] == [1, 1]
    assert list(body) == ["h", "n", "d", "k", "S", "A", "M", "variables", "p", "eqA", "toric", "eqB", "contact"]


def test_equations_multiple_h(capsys):
    code, out, _ = run(capsys, "equations", "-i", WORKED, "--h", "0,1", "--h", "1,0")
    assert code == 0
    body = json.loads(out)
    assert isinstance(body, list) and [b["k"] for b in body] == [1, 0]


def test_verify_worked(capsys):
    code, out, _ = run(capsys, "verify", "-i", WORKED, "--h", "0,1", "--samples", "100", "--tol", "1e-9", "--seed", "42")
    assert code == 0
    body = json.loads(out)
    assert body["passed"] and body["max_residual"] <= 1e-9 and body["points"] == 100


def test_verify_tight_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "-i", WORKED, "--h", "0,1", "--tol", "1e-300")
    assert code == 3 and json.loads(out)["passed"] is False


def test_verify_presentation_roundtrip(tmp_path, capsys):
    pres = tmp_path / "pres.json"
    assert main(["equations", "-i", WORKED, "--h", "0,1", "--output", str(pres)]) == 0
    code, out, _ = run(capsys, "verify", "-i", WORKED, "--presentation", str(pres))
    assert code == 0 and json.loads(out)["passed"]


def test_stabilizer_and_limits(capsys):
    code, out, _ = run(capsys, "stabilizer", "-i", NO_CONTACT, "--h", "0,1")
    assert code == 0
    assert json.loads(out)["S"] in ([[-2, 1]], [[2, -1]])
    code, out, _ = run(capsys, "limits", "-i", NO_CONTACT, "--h", "0,1")
    body = json.loads(out)
    assert body["contact"] is None and body["limit_set"]["empty"]
    code, out, _ = run(capsys, "limits", "-i", WORKED, "--h", "0,1")
    assert json.loads(out)["limit_set"]["dimension"] == 1


def test_arc(capsys):
    code, out, _ = run(capsys, "arc", "-i", WORKED, "--h", "0,1", "--m-max", "20")
    assert code == 0
    rows = json.loads(out)["arc"]
    assert len(rows) == 20 and all(r["pass"] for r in rows)
    assert rows[-1]["distance"] <= 1e-5
    code, _, err = run(capsys, "arc", "-i", WORKED, "--h", "0,1", "--a", "1,2")
    assert code == 1 and "not zero" in err


def test_orbit_and_components(capsys):
    code, out, _ = run(capsys, "orbit", "-i", WORKED, "--h", "0,1", "--h", "3,1")
    assert code == 0 and json.loads(out)["result"] == "equal"
    code, out, _ = run(capsys, "orbit", "-i", WORKED, "--h", "0,1", "--h", "0,2")
    assert json.loads(out)["result"] == "not-equal-within-bound"
    code, out, _ = run(capsys, "components", "-i", WORKED, "--point", "5,1", "--h-bound", "3")
    assert code == 0 and json.loads(out)["representatives"] == [[0, 1]]


def test_text_format(capsys):
    code, out, _ = run(capsys, "equations", "-i", WORKED, "--h", "0,1", "--format", "text")
    assert code == 0
    assert "v2 - 1" in out and "p:" in out and not out.lstrip().startswith("{")


@pytest.mark.parametrize("cmd", [["equations", "--h", "0,1"], ["verify", "--h", "0,1", "--seed", "7"]])
def test_deterministic_bytes(cmd, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}.json"
        subprocess.run(
            [sys.executable, "-m", "canext", cmd[0], "-i", WORKED, *cmd[1:], "--output", str(path)], check=True
        )
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
