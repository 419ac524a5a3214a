import json
import math

import numpy as np
import pytest

from opgamma import opfile
from opgamma.cli import main
from opgamma.lazy_ops import ConstantTail, FormulaTail, LazyOperator

D = LazyOperator.diagonal


@pytest.fixture
def files(tmp_path):
    paths = {}

    def put(name, op):
        p = tmp_path / f"{name}.json"
        opfile.save(p, op, name)
        paths[name] = str(p)

    put("diag", np.diag([0, 0.5, 1]))
    put("zero", np.zeros((2, 2)))
    put("rank1", np.array([[1.0, 0], [0, 0]]))
    put("fshift", LazyOperator.forward_shift((), FormulaTail([1], [0, 1], 0.0, "decreasing")))
    put("mseq", D((), FormulaTail([0, 1], [1], math.inf, "increasing")))
    put("mseq2", D((), FormulaTail([1, 0, 1], [0, 1], math.inf, "increasing")))
    put("oneplus", D((), FormulaTail([1, 1], [0, 1], 1.0, "decreasing")))
    put("invn", D((), FormulaTail([1], [0, 1], 0.0, "decreasing")))
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "diagonal", "tail": {"type": "formula", "num": [1], "den": [0, 1], '
                   '"limit": 0, "direction": "increasing"}}')
    paths["bad"] = str(bad)
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    paths["broken"] = str(broken)
    paths["dir"] = tmp_path
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_examples(files, capsys):
    code, out, _ = run(capsys, "analyze", files["diag"])
    assert code == 0 and "gamma = 0.5 (attained)" in out
    code, out, _ = run(capsys, "analyze", files["fshift"])
    assert code == 0 and "m = 0 (not attained)" in out and "closed_range = false" in out
    code, out, _ = run(capsys, "analyze", files["zero"])
    assert "gamma = inf" in out and "pinv_norm = 0" in out


def test_analyze_json_and_idempotent_roundtrip(files, capsys, tmp_path):
    _, out1, _ = run(capsys, "analyze", files["diag"], "--format", "json")
    d = json.loads(out1)
    assert {"m", "gamma", "attains_min", "attains_reduced_min", "closed_range", "bounded",
            "pinv_norm", "min_witness", "gamma_witness"} <= set(d)
    copy = tmp_path / "copy.json"
    opfile.save(copy, opfile.load(files["diag"]).operator, "diag")
    _, out2, _ = run(capsys, "analyze", copy, "--format", "json")
    assert out1 == out2


def test_analyze_witness_and_digits(files, capsys):
    _, out, _ = run(capsys, "analyze", files["oneplus"], "--witness", "--digits", "3")
    assert "gamma = 1 (not attained)" in out and "gamma_witness = none" in out


def test_exit_codes(files, capsys):
    assert run(capsys, "analyze", files["broken"])[0] == 2
    assert run(capsys, "analyze", files["dir"] / "missing.json")[0] == 2
    assert run(capsys, "analyze", files["bad"])[0] == 3
    assert run(capsys, "pinv", files["invn"])[0] == 4
    assert run(capsys, "gap", files["diag"], files["mseq"])[0] == 3
    assert run(capsys, "lstsq", files["mseq"], "1")[0] == 4
    assert run(capsys, "verify", "--suite", "T1", "--tol", "1e-15")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_theta_ni(files, capsys):
    code, out, _ = run(capsys, "theta-ni", files["mseq"], "3")
    assert code == 0 and "theta = 0.447213595" in out
    _, out, _ = run(capsys, "theta-ni", files["diag"], "2", "--format", "json")
    d = json.loads(out)
    assert d["direct"] == pytest.approx(d["corrected"], abs=1e-12)


def test_gap(files, capsys):
    _, out, _ = run(capsys, "gap", files["mseq"], files["mseq2"])
    assert "theta = 0.316227766" in out
    _, out, _ = run(capsys, "gap", files["diag"], files["zero"].replace("zero", "diag"), "--format", "json")
    assert json.loads(out)["eta"] == pytest.approx(0, abs=1e-12)


def test_pinv_writes_file(files, capsys, tmp_path):
    out_path = tmp_path / "p.json"
    code, _, _ = run(capsys, "pinv", files["diag"], "--out", out_path)
    assert code == 0
    assert np.allclose(opfile.load(out_path).operator, np.diag([0, 2, 1]))
    code, out, _ = run(capsys, "pinv", files["oneplus"], "--format", "json")
    assert json.loads(out)["tail"]["maps"] == [["reciprocal"]]


def test_lstsq(files, capsys):
    code, out, _ = run(capsys, "lstsq", files["rank1"], "1,1")
    assert code == 0 and "x = [1, 0]" in out
    code, _, _ = run(capsys, "lstsq", files["rank1"], "[[1, 0], 2]")
    assert code == 0
    assert run(capsys, "lstsq", files["rank1"], "a,b")[0] == 2


def test_perturb(files, capsys, tmp_path):
    s_path, p_path = tmp_path / "s.json", tmp_path / "tp.json"
    code, out, _ = run(capsys, "perturb", files["oneplus"], "0.1", "--out", s_path, "--out-perturbed", p_path)
    assert code == 0 and "new_gamma = 1 (attained)" in out and "s_norm = 0.05" in out
    S, Lp = opfile.load(s_path).operator, opfile.load(p_path).operator
    assert S.weights[20] == pytest.approx(-0.05) and Lp.weights[20] == 1
    _, out, _ = run(capsys, "perturb", files["invn"], "0.2", "--format", "json")
    d = json.loads(out)
    assert d["certificate"]["branch"] == "lift" and d["perturbed"]["tail"] == {"type": "constant", "value": [0.1, 0.0]}


def test_verify(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--suite", "T2,T11", "--trials", "20", "--out", report)
    assert code == 0 and "2/2 pass" in out
    assert json.loads(report.read_text())["summary"]["pass"] == 2
    assert run(capsys, "verify", "--suite", "T42")[0] == 3
    assert run(capsys, "verify", "--suite", "T1", "--dim", "40")[0] == 3


def test_env_tolerance(monkeypatch, capsys):
    monkeypatch.setenv("OPGAMMA_CHECK_TOL", "1e-15")
    assert run(capsys, "verify", "--suite", "T3", "--trials", "30")[0] == 1
    assert run(capsys, "verify", "--suite", "T3", "--trials", "30", "--tol", "1e-8")[0] == 0
