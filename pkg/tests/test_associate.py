from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgva import (Associate, DomainViolation, assoc_check, assoc_extract_p, assoc_from_p, assoc_transform, fg_builtin,
                  nonvanishing_probe, phi_from_literal, tanh_law)
from fgva.series import LaurentSeries, log1p_series, reversion
from strategies import gseries, rationals

INF = float("inf")
X = LaurentSeries({1: 1}, INF, "x")


def table(rows):
    return {(e, k): Fraction(c) for k, row in rows.items() for e, c in row.items() if c}


def sqrt_ratio(n):
    """Coefficients of sqrt((1 + z)/(1 - z)) = (1 + z)/sqrt(1 - z^2) below z^n."""
    inv = [Fraction(comb(2 * m, m), 4 ** m) if k == 2 * m else 0 for k in range(n) for m in [k // 2]]
    return [inv[k] + (inv[k - 1] if k else 0) for k in range(n)]


def test_geometric_and_exponential_associates():
    a = assoc_from_p(fg_builtin("additive"), LaurentSeries({2: 1}, INF, "x"), 6)
    assert a.table() == table({k: {k + 1: 1} for k in range(6)})
    e = assoc_from_p(fg_builtin("additive"), X, 6)
    assert e.table() == table({k: {1: Fraction(1, factorial(k))} for k in range(6)})


def test_multiplicative_associates():
    m = assoc_from_p(fg_builtin("multiplicative"), X, 6)
    assert m.table() == {(1, 0): 1, (1, 1): 1}
    c = assoc_from_p(fg_builtin("multiplicative"), LaurentSeries({0: 1}, INF, "x"), 6)
    logs = log1p_series(6, "z")
    assert c.table() == {(1, 0): 1, **{(0, k): v for k, v in logs.coeffs.items()}}


def test_tanh_associate():
    t = assoc_from_p(tanh_law(8), X, 6)
    assert t.table() == table({k: {1: c} for k, c in enumerate(sqrt_ratio(6))})


def test_translation_is_not_a_multiplicative_associate():
    phi = phi_from_literal("x + z", 5)
    assert assoc_check(phi, fg_builtin("additive")).ok
    r = assoc_check(phi, fg_builtin("multiplicative"))
    assert not r.ok and r.witness is not None
    with pytest.raises(DomainViolation):
        Associate(phi, fg_builtin("multiplicative"))


def test_extract_p():
    for F, p in ((fg_builtin("additive"), LaurentSeries({2: 1}, INF, "x")),
                 (fg_builtin("multiplicative"), X),
                 (fg_builtin("additive"), LaurentSeries({-1: 1, 0: 3}, INF, "x"))):
        assert assoc_extract_p(assoc_from_p(F, p, 5)) == p


def test_probe_verdicts():
    a = assoc_from_p(fg_builtin("additive"), LaurentSeries({0: 1}, INF, "x"), 5)
    r = nonvanishing_probe("x1 - x2", a)
    assert r.ok and r.details["witness_exponents"] == (0, 1)
    ident = phi_from_literal("x + O(z^5)")
    assert nonvanishing_probe("x1 - x2", ident).verdict == "insufficient-precision"


laws = st.sampled_from(["additive", "multiplicative", "tanh"])
ps = st.dictionaries(st.integers(-1, 3), rationals, max_size=3).map(lambda d: LaurentSeries(d, INF, "x"))


def law(name):
    return tanh_law(8) if name == "tanh" else fg_builtin(name)


@settings(max_examples=20, deadline=None)
@given(laws, ps)
def test_classification_round_trip(name, p):
    a = assoc_from_p(law(name), p, 6)
    assert assoc_extract_p(a) == p
    assert assoc_check(a.phi, law(name)).ok


@settings(max_examples=15, deadline=None)
@given(ps, gseries(order=7))
def test_retime_inverse_is_identity(p, g):
    a = assoc_from_p(fg_builtin("multiplicative"), p, 5)
    b = assoc_transform(a, g, kind="retime", order=5)
    back = assoc_transform(b, reversion(g, 7), kind="retime", order=5)
    assert back.phi.agrees(a.phi.truncate(5))
    assert back.group.poly.truncate(6) == fg_builtin("multiplicative").poly.truncate(6)
