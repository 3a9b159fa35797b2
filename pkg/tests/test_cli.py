import io
import json
import re

import pytest

from fgva.cli import main

RAT = re.compile(r"-?\d+(?:/\d+)?")


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def json_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_log_of_multiplicative_law():
    code, out = run("fg", "log", "--group", "mult", "--order", "8")
    assert code == 0
    assert out.strip() == "x - 1/2*x^2 + 1/3*x^3 - 1/4*x^4 + 1/5*x^5 - 1/6*x^6 + 1/7*x^7 + O(x^8)"


def test_geometric_associate():
    code, out = run("assoc", "from-p", "--group", "add", "--p", "x^2", "--z-order", "5", "--x-window", "0:6")
    assert code == 0
    assert out.strip() == "x + x^2*z + x^3*z^2 + x^4*z^3 + x^5*z^4 + O(z^5)"


def test_noncommutative_weak_comm_fails():
    code, out = run("check", "weak-comm", "--example", "upper_triangular", "--k-max", "4", "--json")
    assert code == 1
    (report,) = json_lines(out)
    assert report["verdict"] == "fail" and report["multiplier"] is None
    assert report["witness"]["exponents"] == [0, 0]
    assert set(report) >= {"check", "inputs", "window", "verdict", "multiplier", "witness"}


@pytest.mark.parametrize("name", ["paper-tables", "golden"])
def test_suites_pass(name):
    assert run("suite", name)[0] == 0


def test_axioms_suite():
    code, out = run("suite", "axioms-all", "--order", "6", "--json")
    assert code == 0
    assert all(r["verdict"] == "pass" for r in json_lines(out))


def test_fields_closure():
    code, _ = run("fields", "closure", "--example", "heisenberg", "--phi", "x*e^z", "--depth", "2",
                  "--weight-cap", "3", "--mode-window", "6", "--json")
    assert code == 0


def test_other_commands():
    assert run("check", "jacobi", "--example", "poly_t", "--window", "-3:3,-3:3,-3:3")[0] == 0
    assert run("check", "weak-assoc", "--example", "poly_t", "--group", "mult", "--window", "-6:5")[0] == 0
    assert run("check", "d-def", "--example", "poly_t")[0] == 0
    assert run("check", "g-equiv", "--example", "poly_t", "--g", "x + 1/2*x^2 + O(x^8)")[0] == 0
    assert run("assoc", "probe", "--phi", "x+z", "--q", "x1-x2", "--z-order", "5")[0] == 0
    assert run("zhu", "transform", "--example", "poly_t", "--deg", "neg", "--order", "4")[0] == 0
    assert run("va", "d-operator", "--example", "poly_t")[0] == 0
    assert run("fg", "check", "--group", "x + y + x*y")[0] == 0


def test_exit_codes():
    assert run("fg", "check", "--group", "x + y + x^2")[0] == 1
    assert run("fg", "log", "--group", "mult", "--order", "0")[0] == 64
    assert run("fg", "log", "--group", "x + y + ")[0] == 64
    assert run("check", "weak-comm", "--example", "nope")[0] == 64
    assert run("check", "weak-comm", "--window", "4:2")[0] == 64
    # a law that is not known far enough for its log is a domain error
    assert run("fg", "from-log", "--f", "x + O(x^3)", "--order", "6")[0] == 2


def test_default_order_from_environment(monkeypatch):
    monkeypatch.setenv("FGVA_DEFAULT_ORDER", "5")
    assert run("fg", "log", "--group", "mult")[1].strip() == "x - 1/2*x^2 + 1/3*x^3 - 1/4*x^4 + O(x^5)"
    monkeypatch.setenv("FGVA_DEFAULT_ORDER", "zero")
    assert run("fg", "log", "--group", "mult")[0] == 64


@pytest.mark.parametrize("argv", [
    ("va", "build", "--example", "poly_t", "--labels", "t,t^2"),
    ("zhu", "xw", "--order", "4", "--window", "-3:2"),
    ("check", "weak-comm", "--example", "upper_triangular", "--k-max", "2"),
    ("fg", "check", "--group", "x + y + x^2*y - x*y^2"),
])
def test_text_and_json_agree(argv):
    code_t, text = run(*argv)
    code_j, js = run(*argv, "--json")
    assert code_t == code_j
    numbers = []
    for line in json_lines(js):
        if line.get("kind"):
            assert line["text"] in text
        w = line.get("witness")
        if w:
            numbers += [str(e) for e in w["exponents"]] + [w["lhs"], w["rhs"]]
        for entry in line.get("data", {}).get("series", []):
            # unit coefficients and the exponents 0 and 1 are implicit in text form
            numbers += [str(entry["exp"])] if entry["exp"] not in (0, 1) else []
            numbers += [c for c in entry["vector"].values() if c not in ("1", "-1")]
    found = {f.lstrip("-") for f in RAT.findall(text)}
    assert {n.lstrip("-") for n in numbers} <= found
