from fractions import Fraction

import pytest
from hypothesis import given, settings

from fgva.errors import PrecisionExhausted
from fgva.literals import format_series, parse_series
from fgva.series import (LaurentSeries, compose, exp, exp_series, expm1_series, geometric_series, log, log1p_series,
                         reversion, var_series)
from strategies import gseries, laurent, power_series

x = var_series()


def log1p_oracle(order):
    return LaurentSeries({n: Fraction((-1) ** (n - 1), n) for n in range(1, order)}, order)


def test_products():
    assert (1 + x) * (1 - x) == LaurentSeries({0: 1, 2: -1})
    assert x * x.inverse() == LaurentSeries.constant(1)


def test_log_derivative_times_one_plus_x():
    N = 12
    assert (log1p_oracle(N + 1).derivative() * (1 + x)).truncate(N) == LaurentSeries.constant(1, order=N)


def test_composition_examples():
    g = exp_series(9) - 1
    assert compose(x, g) == g
    assert compose(log1p_series(9), expm1_series(9), 8) == LaurentSeries({1: 1}, 8)
    geo = (x * geometric_series(8)).truncate(8)
    r = compose(x.inverse(), geo, 6)
    assert r == LaurentSeries({-1: 1, 0: -1}, 6)
    assert (r * geo).truncate(6) == LaurentSeries.constant(1, order=6)


def test_reversion_examples():
    assert reversion(x, 8) == x.truncate(8)
    assert reversion(log1p_series(8), 8) == expm1_series(8)
    geo = (x * geometric_series(8)).truncate(8)
    assert reversion(geo, 8) == (x * geometric_series(7, ratio=-1)).truncate(8)


def test_exp_and_log():
    assert exp(LaurentSeries.zero(order=6)) == LaurentSeries.constant(1, order=6)
    f = log(1 + x, 6)
    assert [f.coefficient(n) for n in range(1, 5)] == [1, Fraction(-1, 2), Fraction(1, 3), Fraction(-1, 4)]
    for N in (5, 12, 20):
        assert exp(log1p_series(N), N) == (1 + x).truncate(N)


def test_calculus():
    assert (x * x).derivative() == 2 * x
    assert x.inverse().derivative() == LaurentSeries.monomial(-2, -1)
    assert geometric_series(8, ratio=-1).integral() == log1p_oracle(9)


def test_truncated_inputs_track_precision():
    s = LaurentSeries({0: 1, 1: 2}, 4)
    assert (s * s).order == 4
    assert (s * x.inverse()).order == 3
    with pytest.raises(PrecisionExhausted):
        reversion(LaurentSeries({1: 1}, 3), 6)


def test_literal_round_trip_example():
    text = "x + 1/3*x^3 + 1/5*x^5 + O(x^7)"
    assert format_series(parse_series(text)) == text


@given(laurent(order=8), laurent(order=8), laurent(order=8))
def test_ring_axioms(a, b, c):
    assert ((a + b) + c).agrees(a + (b + c))
    assert (a * (b + c)).agrees(a * b + a * c)
    assert (a * b).agrees(b * a)


@settings(max_examples=30, deadline=None)
@given(gseries(order=12), gseries(order=12), gseries(order=12))
def test_composition_group(g, h, k):
    N = 12
    assert compose(compose(g, h, N), k, N) == compose(g, compose(h, k, N), N)
    assert compose(g, x, N) == g.truncate(N) == compose(x, g, N)
    r = reversion(g, N)
    assert compose(g, r, N) == x.truncate(N) == compose(r, g, N)


@settings(max_examples=30, deadline=None)
@given(laurent(low=-2, high=4), laurent(low=-2, high=4), gseries(order=10))
def test_composition_is_multiplicative(h1, h2, g):
    N = 6
    assert compose(h1 * h2, g, N).agrees(compose(h1, g, N) * compose(h2, g, N))


@given(laurent(order=9))
def test_print_parse_round_trip(s):
    assert parse_series(format_series(s)) == s


@settings(max_examples=20, deadline=None)
@given(power_series(order=10))
def test_higher_order_never_changes_reported_coefficients(p):
    g = x + p * x * x
    low = reversion(g.truncate(8), 8)
    high = reversion(g.truncate(10), 10)
    assert high.truncate(8) == low
