import json
import subprocess
import sys

import pytest

from bshyper.cli import main

HALF = {"symbols": [{"name": "E", "arity": 2, "alpha": "1/2"}]}
PAIR = {"symbols": [{"name": "E", "arity": 2, "alpha": "sqrt(2)/2"}, {"name": "F", "arity": 2, "alpha": "1-sqrt(2)/2"}]}
SURD = {"symbols": [{"name": "E", "arity": 2, "alpha": "sqrt(2)/2"}]}


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)
    return write


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze(capsys, files):
    code, out, _ = run(capsys, "alpha", "analyze", "--sig", files("h.json", HALF))
    rep = json.loads(out)
    assert code == 0 and rep["rational"] and rep["c"] == 2 and rep["m_pt"] == 3 and rep["m_suff"] == 6
    assert all(g == {"num": 1, "den": 2} for g in rep["granularity"].values())
    rep = json.loads(run(capsys, "alpha", "analyze", "--sig", files("p.json", PAIR))[1])
    assert rep["coherent"] and not rep["rational"] and "beta_lb" in rep
    rep = json.loads(run(capsys, "alpha", "analyze", "--sig", files("s.json", SURD))[1])
    assert not rep["coherent"]


def test_malformed_signature(capsys, files):
    code, _, err = run(capsys, "alpha", "analyze", "--sig", files("bad.json", {"symbols": [{"name": "E"}]}))
    assert code == 2 and json.loads(err)["error"] == "SignatureError"


def test_check_codes(capsys, files):
    sig = files("h.json", HALF)
    pts = files("pts.json", {"universe": ["a", "b", "c"], "relations": {}})
    edge = files("edge.json", {"universe": ["a", "b"], "relations": {"E": [["a", "b"]]}})
    k5 = files("k5.json", {"universe": list("abcde"),
                           "relations": {"E": [[x, y] for x in "abcde" for y in "abcde" if x < y]}})
    assert run(capsys, "check", "kalpha", pts, "--sig", sig)[0] == 0
    assert run(capsys, "check", "strong", edge, "--set", "a", "--sig", sig)[0] == 0
    code, out, _ = run(capsys, "check", "strong", k5, "--set", "a", "--sig", sig)
    assert code == 1 and json.loads(out)["witness"]
    assert run(capsys, "check", "closed", edge, "--set", "a", "--sig", sig)[0] == 0
    assert run(capsys, "check", "kalpha", pts, "--sig", sig, "--cap", 2)[0] == 2


def test_build_verify_cycle(capsys, files, tmp_path):
    sig = files("h.json", HALF)
    out = tmp_path / "emp.json"
    assert run(capsys, "build", "emp", "--sig", sig, "--out", out)[0] == 0
    assert run(capsys, "check", "emp", out)[0] == 0
    assert run(capsys, "verify", out)[0] == 0
    cert = json.loads(out.read_text())
    cert["result"]["relations"]["E"].pop()
    bad = files("bad.json", cert)
    code, rep, _ = run(capsys, "verify", bad)
    assert code == 1 and "first_failure" in json.loads(rep)


def test_build_kinds(capsys, files, tmp_path):
    h, s = files("h.json", HALF), files("s.json", SURD)
    z = tmp_path / "z.json"
    assert run(capsys, "build", "zero", "--sig", h, "--out", z)[0] == 0
    cert = json.loads(z.read_text())
    kinds = {c["kind"] for c in cert["claims"]}
    assert {"in_kalpha", "zero_rank", "zero_set_equals"} <= kinds
    e = tmp_path / "e.json"
    assert run(capsys, "build", "emp", "--sig", s, "--epsilon", "1/10", "--out", e)[0] == 0
    assert run(capsys, "verify", e)[0] == 0
    t = tmp_path / "t.json"
    assert run(capsys, "build", "tent", "-k", 3, "--budget", "3/4", "--sig", h, "--out", t)[0] == 0
    assert run(capsys, "verify", t)[0] == 0
    code, _, err = run(capsys, "build", "tent", "-k", 3, "--budget", "1/4", "--sig", h)
    assert code == 3 and json.loads(err)["error"] == "BudgetInfeasible"
    code, _, err = run(capsys, "build", "zero", "--sig", s)
    assert code == 3 and json.loads(err)["error"] == "NotCoherent"


def test_omit_and_dot(capsys, files, tmp_path):
    h = files("h.json", HALF)
    base = files("b.json", {"universe": ["a", "b"], "relations": {}})
    phi = files("c.json", {"universe": ["a", "b", "x", "y"],
                           "relations": {"E": [["a", "x"], ["b", "x"], ["a", "y"], ["b", "y"], ["x", "y"]]}})
    out = tmp_path / "o.json"
    assert run(capsys, "build", "omit", "--sig", h, "--base", base, "--over", "a", "--phi", phi,
               "--out", out, "--format", "dot")[0] == 0
    assert out.with_suffix(".dot").read_text().startswith("graph")
    assert run(capsys, "verify", out)[0] == 0


def test_deterministic_output(capsys, files, tmp_path):
    h = files("h.json", HALF)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "build", "emp", "--sig", h, "--seed", 4, "--out", a)
    run(capsys, "build", "emp", "--sig", h, "--seed", 4, "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_fragment_resume_and_formula(capsys, files, tmp_path):
    h = files("h.json", HALF)
    f5, f10, r10 = tmp_path / "f5.json", tmp_path / "f10.json", tmp_path / "r10.json"
    run(capsys, "build", "fragment", "--steps", 5, "--sig", h, "--out", f5)
    run(capsys, "build", "fragment", "--steps", 10, "--sig", h, "--out", f10)
    run(capsys, "build", "fragment", "--steps", 10, "--sig", h, "--out", r10, "--resume", f5)
    assert f10.read_bytes() == r10.read_bytes()
    assert run(capsys, "verify", f10)[0] == 0
    task = files("task.json", {"universe": ["p", "q"], "relations": {}})
    code, out, _ = run(capsys, "check", "formula", f10, "--task", task, "--at", "p=v0")
    assert code == 0 and json.loads(out)["label"] == "true-in-fragment"
    star = files("star.json", {"universe": list("pqrstu"), "relations": {"E": [["p", x] for x in "qrstu"]}})
    code, out, _ = run(capsys, "check", "formula", f10, "--task", star, "--at", "p=v0")
    assert code == 1 and json.loads(out)["label"] == "false-in-fragment / unknown-in-generic"


def test_module_entry_point(files):
    r = subprocess.run([sys.executable, "-m", "bshyper", "alpha", "analyze", "--sig", json.dumps(HALF),
                        "--format", "text"], capture_output=True, text=True)
    assert r.returncode == 0 and "m_suff: 6" in r.stdout
