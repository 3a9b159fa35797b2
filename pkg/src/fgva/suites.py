"""Batteries of checks with exact expected values, grouped into suites.

Each battery returns a :class:`Battery`: the reports it produced and a
dictionary of the coefficients it computed, written as text.  Rerunning a
battery with every precision raised by ``bump`` must reproduce those
values unchanged, which is how truncation honesty is tested.

Suites:

* ``paper-tables``: logarithms, the associate table, the retime/bar
  discrepancy and the graded Zhu tables;
* ``axioms-all``: random law and associate round trips, the Borcherds
  axioms, the noncommutative witness, the x e^z module and the Heisenberg
  field algebra;
* ``golden``: frozen coefficient tables compared byte for byte.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import product as iproduct
from math import factorial

from .associate import Associate, assoc_check, assoc_extract_p, assoc_from_p, assoc_transform, first_mismatch
from .errors import FGVAError
from .fields import (check_closure_assoc, closure_generate, compatibility_check, heisenberg_commutator_check,
                     heisenberg_example, normalization_check)
from .formal_group import FormalGroupLaw, fg_builtin, fg_from_log, fg_log
from .harness import box_of, check_jacobi_F, check_weak_assoc, check_weak_comm
from .linear import Vector
from .literals import format_multivariate, format_series
from .report import FAIL, PASS, CheckReport, aggregate, compare_support
from .series import LaurentSeries, exp_series, log1p_series, var_series
from .vertex import borcherds_build, d_operator, poly_t, upper_triangular, vseries_json, vseries_text
from .zhu import (adjoint_module, check_module, check_phi_D_and_commutator, commutator_formula, grading_check,
                  phi_assoc_sides, t_grading, xw_map, zhu_transform)

DEFAULT_SEED = 1729
SQUARE = "x1^2-2*x1*x2+x2^2"


@dataclass
class Battery:
    name: str
    reports: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    @property
    def verdict(self):
        return aggregate(self.reports) if self.reports else PASS

    @property
    def ok(self):
        return self.verdict == PASS

    def add(self, report):
        self.reports.append(report)
        return report


def expect_failure(report: CheckReport, check=None) -> CheckReport:
    """A passing report when ``report`` fails with a witness, a failing one otherwise."""
    name = check or f"expected-failure:{report.check}"
    if report.verdict == FAIL:
        w = report.witness
        details = {"witness": None if w is None else w.to_json(), "note": report.details.get("note")}
        return CheckReport.passed(name, report.inputs, report.window, **details)
    return CheckReport(name, report.inputs, report.window, FAIL, None, None,
                       {"note": f"expected a failure, got {report.verdict}"})


def expect_equal(check, lhs, rhs, names, inputs=None) -> CheckReport:
    """Exact equality of two series on every coefficient both determine."""
    compared, bad = compare_support(lhs, rhs, names)
    inputs = inputs or {}
    window = {"variables": list(names)}
    if bad is not None:
        return CheckReport.failed(check, inputs, window, bad[0], bad[1], bad[2])
    return CheckReport.passed(check, inputs, window, compared=compared)


def expect_value(check, got, want, inputs=None) -> CheckReport:
    inputs = inputs or {}
    if got == want:
        return CheckReport.passed(check, inputs, {})
    return CheckReport(check, inputs, {}, FAIL, None, None, {"note": f"got {got!r}, expected {want!r}"})


def _guard(battery, check, fn, *args, **kwargs):
    """Run one check, turning a library error into an insufficient-precision report."""
    try:
        return battery.add(fn(*args, **kwargs))
    except FGVAError as e:
        return battery.add(CheckReport.insufficient(check, {}, {}, note=f"{type(e).__name__}: {e}"))


def _vtext(s):
    return vseries_text(s)


def _rational(rng):
    return Fraction(rng.randint(-4, 4), rng.randint(1, 4))


# ---------------------------------------------------------------------------
# formal groups


def log_battery(bump=0, **_):
    """Logarithms of the additive and multiplicative laws."""
    b = Battery("logarithms")
    order = 10 + bump
    Fa, Fm = fg_builtin("additive"), fg_builtin("multiplicative")
    f = fg_log(Fm, order)
    want = LaurentSeries({n: Fraction((-1) ** (n - 1), n) for n in range(1, order)}, order, "x")
    b.add(expect_equal("log-multiplicative", f, want, ("x",), {"group": Fm.name, "order": order}))
    fa = fg_log(Fa)
    b.add(expect_value("log-additive-exact", (fa.coeffs, fa.order), (var_series().coeffs, var_series().order)))
    b.values["log F_m"] = format_series(f.truncate(10))
    b.values["log F_a"] = format_series(fa)
    return b


def bijection_battery(bump=0, seed=DEFAULT_SEED, samples=25, **_):
    """fg_from_log(log(1+x)) = x + y + xy, and fg_log inverts fg_from_log on random logarithms."""
    b = Battery("log-bijection")
    order = 10 + bump
    F = fg_from_log(log1p_series(order), order)
    mult = fg_builtin("multiplicative").poly.coeffs
    got = {k: v for k, v in F.poly.coeffs.items() if v}
    b.add(expect_value("from-log-multiplicative", got, dict(mult), {"order": order}))
    rng = random.Random(seed)
    for i in range(samples):
        coeffs = {1: Fraction(1)}
        coeffs.update({n: _rational(rng) for n in range(2, 10)})
        f = LaurentSeries(coeffs, 10, "x")
        # rebuild the law from its polynomial alone so fg_log cannot reuse the cached logarithm
        G = FormalGroupLaw(fg_from_log(f.truncate(order) if order <= 10 else _extend(f, order), order).poly)
        back = fg_log(G, order).truncate(10)
        b.add(expect_equal("log-roundtrip", back, f, ("x",), {"sample": i, "seed": seed}))
        b.values[f"roundtrip {i}"] = format_series(back)
    b.values["from-log log(1+x)"] = format_multivariate(got, ("x", "y"))
    return b


def _extend(f, order):
    """f with its unknown tail set to zero, so a higher-order rerun sees the same series."""
    return LaurentSeries(dict(f.coeffs), order, f.var)


# ---------------------------------------------------------------------------
# associates


def _row_table(rows, z_order):
    return LaurentSeries({k: LaurentSeries(r, float("inf"), "x") for k, r in rows.items() if k < z_order},
                         z_order, "z")


def _series_rows(series_of_z, z_order, x_power):
    """Rows of x^x_power * s(z)^k summed over k, for s given as a list of z-series per k."""
    rows = {}
    for k, s in enumerate(series_of_z):
        for e, c in s.truncate(z_order).coeffs.items():
            rows.setdefault(e, {})
            rows[e][k + x_power] = rows[e].get(k + x_power, 0) + c
    return rows


def expected_associates(z_order):
    """The closed-form associates, built directly from their expansions."""
    exps = {k: {1: Fraction(1, factorial(k))} for k in range(z_order)}
    geometric = {k: {k + 1: Fraction(1)} for k in range(z_order)}
    L = log1p_series(z_order, "z")
    powers = [LaurentSeries.constant(1, "z")]
    for _ in range(1, z_order):
        powers.append((powers[-1] * L).truncate(z_order))
    log_geometric = _series_rows(powers, z_order, 1)
    return [
        ("additive", "0", "x", _row_table({0: {1: 1}}, z_order)),
        ("additive", "1", "x + z", _row_table({0: {1: 1}, 1: {0: 1}}, z_order)),
        ("additive", "x", "x*e^z", _row_table(exps, z_order)),
        ("additive", "x^2", "x/(1 - z*x)", _row_table(geometric, z_order)),
        ("multiplicative", "x", "x*(1 + z)", _row_table({0: {1: 1}, 1: {1: 1}}, z_order)),
        ("multiplicative", "x^2", "x/(1 - x*log(1 + z))", _row_table(log_geometric, z_order)),
    ]


def associate_table_battery(bump=0, **_):
    """assoc_from_p reproduces the closed-form associates at z-order 6."""
    from .literals import parse_series

    b = Battery("associate-table")
    z_order = 6 + bump
    for group, p, label, want in expected_associates(z_order):
        F = fg_builtin(group)
        a = assoc_from_p(F, parse_series(p, "x"), z_order)
        inputs = {"group": group, "p": p, "expected": label}
        b.add(expect_equal("associate-table", a.phi, want, ("z", "x"), inputs))
        b.add(assoc_check(a.phi, F))
        b.values[f"{group} p={p}"] = Associate(a.phi.truncate(6), F, check=False).text()
    return b


def discrepancy_battery(bump=0, **_):
    """retime(x + z, log(1+x)) and bar(x + z) over F_m differ first at x*z."""
    b = Battery("retime-vs-bar")
    z_order = 6 + bump
    Fa, Fm = fg_builtin("additive"), fg_builtin("multiplicative")
    a = assoc_from_p(Fa, LaurentSeries.constant(1), z_order)
    retimed = assoc_transform(a, log1p_series(z_order + 2), "retime")
    barred = assoc_transform(a, kind="bar", group=Fm)
    want_retimed = _row_table({0: {1: 1}, **{k: {0: Fraction((-1) ** (k - 1), k)} for k in range(1, z_order)}},
                              z_order)
    want_barred = _row_table({0: {1: 1}, 1: {0: 1, 1: 1}}, z_order)
    b.add(expect_equal("retime", retimed.phi, want_retimed, ("z", "x"), {"expected": "x + log(1 + z)"}))
    b.add(expect_equal("bar", barred.phi, want_barred, ("z", "x"), {"expected": "x + z + x*z"}))
    b.add(expect_value("retime-group", retimed.group, Fm))
    bad = first_mismatch(barred, retimed)
    b.add(expect_value("first-mismatch", bad, ((1, 1), Fraction(1), Fraction(0))))
    b.values["retime"] = Associate(retimed.phi.truncate(6), Fm, check=False).text()
    b.values["bar"] = Associate(barred.phi.truncate(6), Fm, check=False).text()
    b.values["mismatch"] = repr(bad)
    return b


def associate_property_battery(bump=0, seed=DEFAULT_SEED, samples=50, **_):
    """Random (F, p): the composite axiom holds and p is recovered from the associate."""
    b = Battery("associate-properties")
    z_order = 5 + bump
    rng = random.Random(seed + 1)
    for i in range(samples):
        f = LaurentSeries({1: Fraction(1), **{n: _rational(rng) for n in range(2, 8)}}, z_order + 3, "x")
        F = fg_from_log(f, z_order + 3)
        p = LaurentSeries({e: _rational(rng) for e in range(-2, 5) if rng.random() < 0.5}, float("inf"), "x")
        inputs = {"sample": i, "seed": seed, "p": format_series(p)}
        try:
            a = assoc_from_p(F, p, z_order, validate=False)
        except FGVAError as e:
            b.add(CheckReport.insufficient("associate-axiom", inputs, {}, note=str(e)))
            continue
        r = assoc_check(a.phi, F)
        r.inputs.update(inputs)
        b.add(r)
        b.add(expect_value("extract-build", assoc_extract_p(a), p, inputs))
        b.values[f"sample {i}"] = Associate(a.phi.truncate(5), F, check=False).text()
    return b


# ---------------------------------------------------------------------------
# Borcherds structures


LOW = ("1", "t", "t^2")


def borcherds_battery(bump=0, **_):
    """poly_t over F_a and F_m: weak associativity with l = 0, locality with k = 0, Jacobi identities."""
    b = Battery("borcherds")
    A = poly_t(8)
    Fa, Fm = fg_builtin("additive"), fg_builtin("multiplicative")
    V = borcherds_build(A, Fa)
    W = borcherds_build(A, Fm, 6 + bump)
    for u, v, w in iproduct(LOW, repeat=3):
        r = b.add(check_weak_assoc(V, u, v, w, l_max=0))
        b.values[f"F_a assoc {u},{v},{w}"] = r.multiplier
        r = b.add(check_weak_assoc(W, u, v, w, l_max=0, window=(-6, 5)))
        b.values[f"F_m assoc {u},{v},{w}"] = r.multiplier
    for u, v in iproduct(LOW, repeat=2):
        r = b.add(check_weak_comm(V, u, v, k_max=0))
        b.values[f"F_a comm {u},{v}"] = r.multiplier
    b.add(check_jacobi_F(V, "t", "t", "t", (-5, 5)))
    b.add(check_jacobi_F(W, "t", "t", "t", (-4, 4)))
    b.add(check_jacobi_F(W, "t", "t", "1", (-4, 4)))
    b.values["Y_F_m(t,x)t"] = _vtext(W.Y("t", "t").truncate(6))
    return b


def noncommutative_battery(bump=0, k_max=8, **_):
    """Upper-triangular matrices: weak associativity with l = 0, no weak commutativity for (E12, E22)."""
    b = Battery("noncommutative")
    U = borcherds_build(upper_triangular(), fg_builtin("additive"))
    r = check_weak_comm(U, "E12", "E22", k_max=k_max)
    b.add(expect_failure(r, "weak-comm-fails"))
    obstructed = sorted(k for k, _ in r.details.get("obstructions", []))
    b.add(expect_value("every-k-obstructed", obstructed, list(range(k_max + 1))))
    for u, v, w in iproduct(("1", "E12", "E22"), repeat=3):
        b.add(check_weak_assoc(U, u, v, w, l_max=0))
    b.values["comm witness"] = None if r.witness is None else json.dumps(r.witness.to_json(), sort_keys=True)
    b.values["obstructions"] = repr(r.details.get("obstructions"))
    return b


# ---------------------------------------------------------------------------
# gradings, the Zhu transform and x e^z modules


def zhu_oracle(order):
    """Y[t, x]t = e^{-x} t^2 + (1 - e^{-x}) t modulo x^order."""
    e = exp_series(order, "x", -1)
    rows = {}
    for k, c in e.coeffs.items():
        vec = Vector({"t^2": c, "t": (1 if k == 0 else 0) - c})
        if vec:
            rows[k] = vec
    return LaurentSeries(rows, order, "x")


def xw_oracle(order):
    """e^{-x0} x2^-2 t^2 + (e^{-x0} + 1) x2^-1 t + 1, x0 outermost, modulo x0^order."""
    rows = {}
    for k in range(order):
        c = Fraction((-1) ** k, factorial(k))
        inner = {-2: Vector({"t^2": c}), -1: Vector({"t": c + (1 if k == 0 else 0)})}
        if k == 0:
            inner[0] = Vector({"1": 1})
        rows[k] = LaurentSeries(inner, float("inf"), "x2")
    return LaurentSeries(rows, order, "x0")


def _poly_t_structures(order):
    V = borcherds_build(poly_t(8), fg_builtin("additive"))
    neg = t_grading(V.labels, -1)
    return V, neg, xw_map(adjoint_module(V), neg, order)


def grading_battery(bump=0, **_):
    """deg t^n = -n grades poly_t and +n does not; the Zhu table and the transformed D."""
    b = Battery("grading-zhu")
    V = borcherds_build(poly_t(8), fg_builtin("additive"))
    b.add(grading_check(V, t_grading(V.labels, -1)))
    bad = grading_check(V, t_grading(V.labels, 1))
    b.add(expect_failure(bad, "positive-grading-fails"))
    b.add(expect_value("positive-grading-triple", bad.details.get("triple"), ("t", -2, 1)))
    Z = zhu_transform(V, t_grading(V.labels, -1), 3 + bump)
    table = Z.Y("t", "t")
    b.add(expect_equal("zhu-table", table, zhu_oracle(3 + bump), ("x",), {"u": "t", "v": "t"}))
    Dt = d_operator(Z)["t"]
    b.add(expect_value("zhu-D", Dt, Vector({"1": 1, "t": -1})))
    b.values["Y[t,x]t"] = _vtext(table.truncate(3))
    b.values["D t"] = str(Dt)
    return b


def xw_module_battery(bump=0, **_):
    """The x e^z module of poly_t: weak phi-associativity with q = 1, the golden value, the wrong-phi probe."""
    b = Battery("xw-module")
    order = 6 + bump
    _, _, X = _poly_t_structures(order)
    window = (-4, 3)
    vectors = ["1", "t", "t^2", "t^3", "t^4"]
    b.add(check_module(X, "phi-quasi", {"q": "1"}, window=window, panel=list(LOW), test_vectors=vectors))
    table = xw_table(X)
    b.add(expect_equal("xw-golden", table, xw_oracle(4), ("x0", "x2"), {"u": "t", "v": "t", "w": "1"}))
    wrong = assoc_from_p(fg_builtin("additive"), LaurentSeries.constant(1), order)
    r = check_module(X, "phi-quasi", {"q": "1", "phi": wrong}, window=window, panel=list(LOW),
                     test_vectors=vectors)
    b.add(expect_failure(r, "wrong-phi-fails"))
    b.values["xw (t,t,1)"] = json.dumps(_nested_json(table), sort_keys=True)
    b.values["wrong phi witness"] = None if r.witness is None else json.dumps(r.witness.to_json(), sort_keys=True)
    return b


def xw_table(X, x0_order=4):
    """Right side of weak phi-associativity with q = 1 for (t, t, 1), modulo x0^x0_order."""
    box = box_of((-6, x0_order - 1), ("x0", "x2"))
    _, _, rhs = phi_assoc_sides(X, "t", "t", "1", X.phi, {(0, 0): 1}, box)
    return rhs.truncate(x0_order)


def d_property_battery(bump=0, **_):
    """Y_W(D v, x) = x d/dx Y_W(v, x) and Y_W(e^{zD} v, x) = Y_W(v, x e^z) for v in 1, t, t^2."""
    b = Battery("d-property")
    _, _, X = _poly_t_structures(6 + bump)
    r = b.add(check_phi_D_and_commutator(X, window=5, z_order=3, panel=list(LOW), test_vectors=["1", "t", "t^2"]))
    b.values["verdict"] = r.verdict
    return b


# ---------------------------------------------------------------------------
# the Heisenberg field algebra


def heisenberg_battery(bump=0, **_):
    """Compatibility, depth-2 closure associativity, the commutator formula and the normalization relation."""
    b = Battery("heisenberg")
    space, h = heisenberg_example(3, 6)
    Fa, Fm = fg_builtin("additive"), fg_builtin("multiplicative")
    z_order = 3 + bump
    phi = assoc_from_p(Fa, var_series(), 9 + bump)
    phim = assoc_from_p(Fm, var_series(), 9 + bump)
    b.add(heisenberg_commutator_check(space))
    b.add(compatibility_check(h, h, SQUARE, phi))
    r = compatibility_check(h, h, "x1-x2", phi)
    b.add(expect_failure(r, "compatibility-fails-linear"))
    b.values["linear p witness"] = None if r.witness is None else json.dumps(r.witness.to_json(), sort_keys=True)

    A = closure_generate([h], phi, depth=2, z_order=z_order)
    V = A.vertex_structure(Fa)
    for triple in (("h", "h", "1"), ("h", "1", "h"), ("h", "h", "h"), ("h_(-2)1", "h", "1")):
        r = _guard(b, "closure-assoc", check_closure_assoc, A, V, *triple)
        b.values[f"closure assoc {triple}"] = r.multiplier
    Vm = A.vertex_structure(Fm)
    r = check_closure_assoc(A, Vm, "h", "h", "h")
    b.add(expect_failure(r, "closure-assoc-fails-over-F_m"))

    M = A.module(V)
    box = {"x1": (-5, 5), "x2": (-5, 5)}
    for w in space.labels[:4]:
        compared, bad = commutator_formula(M, "h", "h", w, box)
        if bad is None and compared:
            b.add(CheckReport.passed("commutator-formula", {"w": w}, box, compared=compared))
        elif bad is None:
            b.add(CheckReport.insufficient("commutator-formula", {"w": w}, box))
        else:
            b.add(CheckReport.failed("commutator-formula", {"w": w}, box, bad[0], bad[1], bad[2]))
    b.add(check_phi_assoc_h(M, phi))

    b.add(normalization_check(h, h, SQUARE, phim, phi, fg_log(Fm, 10 + bump), 4 + bump))
    yhh = A.Y("h", "h")
    b.values["Y(h,z)h at 1"] = {k: _vtext(A.evaluate(vec, "1").truncate(7))
                                for k, vec in yhh.items() if k < 1}
    b.values["Y(h,z)h at 1"] = json.dumps(b.values["Y(h,z)h at 1"], sort_keys=True)
    return b


def check_phi_assoc_h(M, phi):
    """Module axiom for (h, h) with q = (x1 - x2)^2 on the weight <= 1 vectors."""
    from .zhu import check_phi_assoc

    reports = [check_phi_assoc(M, "h", "h", w, phi, SQUARE, window=(-3, 2)) for w in ("1", "y1")]
    bad = [r for r in reports if not r.ok]
    if bad:
        return bad[0]
    return CheckReport.passed("phi-assoc", {"u": "h", "v": "h", "q": SQUARE}, reports[0].window,
                              compared=sum(r.details.get("compared", 0) for r in reports))


# ---------------------------------------------------------------------------
# golden fixtures


def _nested_json(s):
    out = []
    for k, row in s.items():
        for e, vec in row.items():
            out.append({"x0": k, "x2": e, "vector": {str(lab): _frac(c) for lab, c in vec.items()}})
    return out


def _frac(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def golden_payloads():
    """Text of every golden fixture, computed from the library."""
    V, neg, X = _poly_t_structures(6)
    Z = zhu_transform(V, neg, 3)
    zhu = {"u": "t", "v": "t", "grading": "deg t^n = -n", "order": 3, "series": vseries_json(Z.Y("t", "t"))}
    xw = {"u": "t", "v": "t", "w": "1", "phi": X.phi.text(), "q": "1", "x0_order": 4,
          "coefficients": _nested_json(xw_table(X))}
    return {
        "zhu_t_t.json": json.dumps(zhu, indent=1, sort_keys=True) + "\n",
        "xw_phi_assoc_t_t_1.json": json.dumps(xw, indent=1, sort_keys=True) + "\n",
    }


def golden_battery(**_):
    b = Battery("golden")
    data = resources.files("fgva") / "data"
    for name, text in golden_payloads().items():
        try:
            frozen = (data / name).read_text()
        except FileNotFoundError:
            b.add(CheckReport(f"golden:{name}", {"file": name}, {}, FAIL, None, None, {"note": "fixture missing"}))
            continue
        if frozen == text:
            b.add(CheckReport.passed(f"golden:{name}", {"file": name}, {}, bytes=len(text.encode())))
        else:
            line = next(i for i, (x, y) in enumerate(zip(frozen.splitlines() + [""], text.splitlines() + [""]), 1)
                        if x != y)
            b.add(CheckReport(f"golden:{name}", {"file": name}, {}, FAIL, None, None,
                              {"note": f"fixture differs at line {line}"}))
    return b


# ---------------------------------------------------------------------------
# suites


SUITES = {
    "paper-tables": (log_battery, associate_table_battery, discrepancy_battery, grading_battery),
    "axioms-all": (bijection_battery, associate_property_battery, borcherds_battery, noncommutative_battery,
                   xw_module_battery, d_property_battery, heisenberg_battery),
    "golden": (golden_battery,),
}


def run_suite(name, bump=0, seed=DEFAULT_SEED):
    """Run every battery of a suite; returns the list of batteries."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return [fn(bump=bump, seed=seed) for fn in SUITES[name]]
