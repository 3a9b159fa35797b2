from fractions import Fraction

import pytest
from hypothesis import given, settings

from fgva import DomainViolation, MPoly, fg_builtin, fg_check, fg_conjugate, fg_from_log, fg_log, parse_group, tanh_law
from fgva.series import LaurentSeries, compose, expm1_series, log1p_series
from strategies import gseries

INF = float("inf")


def tanh_oracle(order):
    """(x + y)/(1 + xy) = (x + y) sum (-xy)^k, truncated by total degree."""
    out = {}
    k = 0
    while 2 * k + 1 < order:
        s = Fraction((-1) ** k)
        out[(k + 1, k)] = out.get((k + 1, k), 0) + s
        out[(k, k + 1)] = out.get((k, k + 1), 0) + s
        k += 1
    return MPoly(2, out, order)


def test_builtin_logs():
    assert fg_log(fg_builtin("additive")) == LaurentSeries({1: 1}, INF, "x")
    assert fg_log(fg_builtin("multiplicative"), 8) == log1p_series(8)


def test_tanh_law_matches_rational_function():
    assert tanh_law(9).poly == tanh_oracle(9)
    artanh = LaurentSeries({n: Fraction(1, n) for n in range(1, 9, 2)}, 9, "x")
    assert fg_log(tanh_law(9), 9).agrees(artanh)


def test_from_log_recovers_builtins():
    assert fg_from_log(log1p_series(8), 8).poly == fg_builtin("multiplicative").poly.truncate(8)
    assert fg_from_log(LaurentSeries({1: 1}, 8, "x"), 8).poly == fg_builtin("additive").poly.truncate(8)


def test_conjugation_swaps_builtins():
    # F_a conjugated by log(1+x) is F_m, and F_m conjugated by e^x - 1 is F_a
    assert fg_conjugate(fg_builtin("additive"), log1p_series(8), 8).poly == \
        fg_builtin("multiplicative").poly.truncate(8)
    assert fg_conjugate(fg_builtin("multiplicative"), expm1_series(8), 8).poly == \
        fg_builtin("additive").poly.truncate(8)


def test_fg_check_verdicts():
    assert fg_check("x + y + x*y").ok
    bad = fg_check("x + y + x^2")
    assert not bad.ok and bad.details["law"] == "unit"
    assert bad.witness.exponents == (2, 0)
    r = fg_check("x + y + x^2*y - x*y^2")
    assert not r.ok and r.details["law"] in ("associativity", "commutativity")


def test_invalid_law_is_refused():
    with pytest.raises(DomainViolation):
        parse_group("x + y + x^2*y")


def test_log_needs_g_series():
    with pytest.raises(DomainViolation):
        fg_from_log(LaurentSeries({1: 2}, 6, "x"), 6)


@settings(max_examples=25, deadline=None)
@given(gseries(order=8))
def test_log_law_bijection(f):
    # rebuild the law from its polynomial alone so the cached log is not reused
    F = fg_from_log(f, 8)
    bare = type(F)(F.poly)
    assert fg_log(bare, 8).agrees(f.truncate(8))


@settings(max_examples=20, deadline=None)
@given(gseries(order=7), gseries(order=7))
def test_conjugation_is_an_action(g, h):
    # (F_g)_h = F_{g o h}
    F = fg_builtin("multiplicative")
    step = fg_conjugate(fg_conjugate(F, g, 7), h, 7)
    assert step.poly == fg_conjugate(F, compose(g, h, 7), 7).poly


@settings(max_examples=20, deadline=None)
@given(gseries(order=7))
def test_conjugation_moves_the_log(g):
    # the log of F_g is f o g
    F = fg_builtin("multiplicative")
    Fg = type(F)(fg_conjugate(F, g, 7).poly)
    assert fg_log(Fg, 7).agrees(compose(log1p_series(7), g, 7))
