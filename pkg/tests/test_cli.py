import json
import pathlib

import pytest

from lovx.cli import run

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"


def d(name):
    return str(DATA / name)


def report(tmp_path, argv):
    out = tmp_path / "report.json"
    code = run(argv + ["--out", str(out)])
    return code, json.loads(out.read_text())


def test_eval_example(tmp_path):
    code, rep = report(tmp_path, ["eval", "--function", d("card3.json"), "--point", "0.5,0.2,0.9"])
    assert code == 0 and rep["status"] == "ok"
    assert rep["results"]["value"] == pytest.approx(1.6)
    assert rep["seed"] == 42 and "seconds" in rep["timing"] and len(rep["digest"]) == 64


def test_alpha_example(tmp_path):
    code, rep = report(tmp_path, ["invariant", "alpha", "--graph", d("p3.json"), "--method", "both"])
    res = rep["results"]
    assert code == 0
    assert res["value"] == 2 and res["continuous"] >= 2 - 1e-6 and "gap" in res


def test_morse_critical_example(tmp_path):
    code, rep = report(tmp_path, ["morse", "critical", "--complex", d("circle.json"),
                                  "--function", d("circle_morse.json")])
    assert code == 0 and rep["results"]["morse_vector"] == [1, 1]


@pytest.mark.parametrize("argv", [
    ["subgrad", "--function", "card3.json", "--point", "0.3,-1,2", "--vertices"],
    ["check", "submodularity", "--function", "card3.json"],
    ["check", "catalog", "--graph", "p3.json", "--row", "cut", "--trials", "50"],
    ["solve", "dinkelbach", "--function", "card3.json", "--denominator", "card3.json"],
    ["invariant", "cheeger", "--graph", "p3.json", "--variant", "h_ver"],
    ["invariant", "cheeger", "--graph", "p3_boundary.json", "--variant", "dirichlet"],
    ["invariant", "vertex-cover", "--graph", "p3.json"],
    ["laplace", "verify-dirichlet", "--graph", "p3_boundary.json", "--point", "0,1,0", "--mu", "1"],
    ["laplace", "nodal", "--graph", "p3.json", "--point", "1,0,-1"],
    ["morse", "euler", "--complex", "circle.json", "--function", "circle_morse.json"],
    ["morse", "order", "--complex", "circle.json"],
    ["morse", "pl", "--complex", "circle.json", "--function", "circle_morse.json", "--face", "1,2"],
    ["morse", "hypergraph", "--hypergraph", "hyper.json", "--function", "hyper_f.json"],
])
def test_commands_succeed(tmp_path, argv):
    argv = [d(a) if a.endswith(".json") else a for a in argv]
    code, rep = report(tmp_path, argv)
    assert code == 0, rep.get("error")
    assert "results" in rep


def test_exit_codes(tmp_path, capsys):
    assert run(["bogus"]) == 2
    assert run(["eval", "--function", d("card3.json")]) == 2  # --point missing
    code, rep = report(tmp_path, ["eval", "--function", str(tmp_path / "missing.json"), "--point", "1,2,3"])
    assert code == 1 and "not found" in rep["error"]
    code, rep = report(tmp_path, ["laplace", "verify-dirichlet", "--graph", d("p3_boundary.json"),
                                  "--point", "0,1,0", "--mu", "0.5"])
    assert code == 1 and rep["results"]["report"]["feasible"] is False
    capsys.readouterr()


def test_duplicate_edge_rejected(tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"n": 3, "edges": [[0, 1], [1, 0]]}))
    code, rep = report(tmp_path, ["invariant", "alpha", "--graph", str(g)])
    assert code == 1 and "error" in rep


def test_overlap_reported_with_field_path(tmp_path):
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"n": 3, "mode": "pair",
                             "entries": [{"arg": [[[0], [1]]], "value": 1}, {"arg": [[[0, 2], [2]]], "value": 2}]}))
    code, rep = report(tmp_path, ["eval", "--function", str(f), "--point", "1,0,-1"])
    assert code == 1 and "entries[1]" in rep["error"]


def test_reports_deterministic_modulo_timing(capsys):
    argv = ["invariant", "cheeger", "--graph", d("p3.json"), "--method", "both"]
    outs = []
    for _ in range(2):
        assert run(argv) == 0
        rep = json.loads(capsys.readouterr().out)
        rep.pop("timing")
        outs.append(json.dumps(rep, sort_keys=True))
    assert outs[0] == outs[1]


def test_rayleigh_reports_undefined_quotient(tmp_path):
    code, rep = report(tmp_path, ["laplace", "rayleigh", "--graph", d("p3_boundary.json"), "--point", "0,1,0"])
    res = rep["results"]
    assert code == 0
    assert res["R1"] == 1.0 and res["dirichlet"] == 1.0
    assert res["neumann"] is None and "zero denominator" in res["undefined"]["neumann"]
    code, rep = report(tmp_path, ["laplace", "rayleigh", "--graph", d("p3.json"), "--point", "0,0,0"])
    assert code == 1
