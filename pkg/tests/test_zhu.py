from fractions import Fraction
from math import factorial

from hypothesis import given, settings

from fgva import (adjoint_module, borcherds_build, check_module, check_phi_assoc, check_phi_D_and_commutator,
                  d_operator, fg_builtin, grading_check, module_transform, poly_t, xw_map, zhu_transform)
from fgva.linear import Vector
from fgva.series import LaurentSeries, reversion
from fgva.zhu import l0_conjugation_check, t_grading
from strategies import gseries

INF = float("inf")
V = borcherds_build(poly_t(8), fg_builtin("additive"))
NEG = t_grading(V.labels, -1)
X = xw_map(adjoint_module(V), NEG, 6)


def test_grading():
    assert grading_check(V, NEG).ok
    bad = grading_check(V, t_grading(V.labels, 1))
    assert bad.verdict == "fail"
    assert bad.details["triple"] == ("t", -2, 1)


def test_l0_conjugation():
    assert l0_conjugation_check(V, NEG).ok


def test_zhu_table():
    # Y[t, x]t = e^{-x} t^2 + (1 - e^{-x}) t
    Z = zhu_transform(V, NEG, 5)
    rows = {}
    for k in range(5):
        c = Fraction((-1) ** k, factorial(k))
        rows[k] = Vector({"t^2": c, "t": (1 if k == 0 else 0) - c})
    assert Z.Y("t", "t").agrees(LaurentSeries(rows, 5, "x"))
    assert d_operator(Z)["t"] == Vector({"1": 1, "t": -1})


def test_xw_values():
    assert X.Y("t", "1") == LaurentSeries({-1: Vector({"t": 1}), 0: Vector({"1": 1})}, INF, "x")
    assert X.phi.table() == {(1, k): Fraction(1, factorial(k)) for k in range(6)}
    assert X.algebra.group == fg_builtin("additive")


def test_module_checks():
    vectors = ["1", "t", "t^2"]
    assert check_module(adjoint_module(V), "module", panel=["1", "t"], test_vectors=vectors).ok
    assert check_module(X, "phi-quasi", {"q": "1"}, window=(-4, 3), panel=["1", "t"], test_vectors=vectors).ok
    assert check_phi_assoc(X, "t", "t", "1", q="1", window=(-4, 3)).ok


def test_d_property():
    r = check_phi_D_and_commutator(X, window=5, z_order=3, panel=["1", "t"], test_vectors=["1", "t"])
    assert r.ok


def test_transforms_keep_identity_fields():
    g = LaurentSeries({1: 1}, INF, "x")
    assert module_transform(X, g) is X


@settings(max_examples=6, deadline=None)
@given(gseries(order=7))
def test_coordinate_change_round_trip(g):
    M = adjoint_module(V)
    there = module_transform(M, g, order=5)
    back = module_transform(there, reversion(g, 7), order=5)
    assert back.algebra.group == fg_builtin("additive")
    for u, w in (("t", "t"), ("t^2", "1"), ("t", "t^2")):
        assert back.Y(u, w).agrees(M.Y(u, w).truncate(5))


@settings(max_examples=6, deadline=None)
@given(gseries(order=7))
def test_retime_round_trip(g):
    there = module_transform(X, g, kind="retime", order=5)
    back = module_transform(there, reversion(g, 7), kind="retime", order=5)
    assert back.phi.phi.agrees(X.phi.phi.truncate(5))
    assert back.Y("t", "t") == X.Y("t", "t")
