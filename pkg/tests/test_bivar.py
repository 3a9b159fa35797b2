from fractions import Fraction
from math import factorial

from hypothesis import given, settings
from hypothesis import strategies as st

from fgva.bivar import (BiSeries, MPoly, double_substitution_roundtrip, iota_expand, shift_part, substitute_second,
                        taylor_substitute)
from fgva.formal_group import fg_builtin
from fgva.series import LaurentSeries, log1p_series
from strategies import gseries, nonzero_rationals, rationals

INF = float("inf")


def nested(table, outer, inner, order=INF):
    """Nested series from {(inner_exp, outer_exp): c}."""
    rows = {}
    for (i, o), c in table.items():
        rows.setdefault(o, {})[i] = c
    return LaurentSeries({o: LaurentSeries(r, INF, inner) for o, r in rows.items()}, order, outer)


def pp(text, names):
    return BiSeries.parse(text, names, "PP")


def test_iota_of_inverse_difference_both_directions():
    one, d = pp("1", ("x1", "x2")), pp("x1-x2", ("x1", "x2"))
    r = iota_expand(one, d, ("x1", "x2"), 6)
    assert r.series.var == "x2"
    assert r.to_dict() == {(-1 - j, j): 1 for j in range(6)}
    s = iota_expand(one, d, ("x2", "x1"), 6)
    # keys follow the expansion order (x2, x1)
    assert s.to_dict() == {(-1 - j, j): -1 for j in range(6)}


def test_iota_of_multiplicative_law_inverts_it():
    F = pp("x+y+x*y", ("x", "y"))
    r = iota_expand(pp("1", ("x", "y")), F, ("x", "y"), 5)
    back = (r.series * nested({(1, 0): 1, (0, 1): 1, (1, 1): 1}, "y", "x")).truncate(5)
    assert back.agrees(LaurentSeries.constant(LaurentSeries.constant(1, "x"), "y"))
    # x^-1 - (1 + x) x^-2 y + ...
    assert r.coefficient(-1, 0) == (True, 1)
    assert r.coefficient(-2, 1) == (True, -1) and r.coefficient(-1, 1) == (True, -1)


def test_retime_substitutions():
    plus = nested({(1, 0): 1, (0, 1): 1}, "z", "x", 6)
    got = substitute_second(plus, log1p_series(6, "z"))
    want = LaurentSeries({0: LaurentSeries({1: 1}, INF, "x"),
                          **{k: LaurentSeries({0: Fraction((-1) ** (k - 1), k)}, INF, "x") for k in range(1, 6)}},
                         6, "z")
    assert got.agrees(want)
    xe = LaurentSeries({k: LaurentSeries({1: Fraction(1, factorial(k))}, INF, "x") for k in range(6)}, 6, "z")
    got = substitute_second(xe, log1p_series(6, "z"))
    assert got.agrees(nested({(1, 0): 1, (1, 1): 1}, "z", "x", 6))


def test_power_under_exponential_coordinate():
    # x1^m at x1 = x2 e^{x0} is x2^m sum_k m^k/k! x0^k
    xe = LaurentSeries({k: LaurentSeries({1: Fraction(1, factorial(k))}, INF, "x2") for k in range(7)}, 7, "x0")
    for m in (-2, -1, 3):
        a = LaurentSeries({m: 1}, INF, "x1")
        got = taylor_substitute(a, "x1", "x2", shift_part(xe), order=6)
        want = LaurentSeries({k: LaurentSeries({m: Fraction(m ** k, factorial(k))}, INF, "x2") for k in range(6)},
                             6, "x0")
        assert got.agrees(want)


def test_linear_substitutions():
    x1 = LaurentSeries({1: 1}, INF, "x1")
    Fm = nested({(1, 0): 1, (0, 1): 1, (1, 1): 1}, "x0", "x2")
    assert taylor_substitute(x1, "x1", "x2", shift_part(Fm), order=4).agrees(Fm)
    # (x1 - x2) at x1 = x2 + x0 is x0
    plus = nested({(1, 0): 1, (0, 1): 1}, "x0", "x2")
    got = taylor_substitute(x1, "x1", "x2", shift_part(plus), order=4)
    x2 = nested({(1, 0): 1}, "x0", "x2")
    assert (got - x2).agrees(nested({(0, 1): 1}, "x0", "x2"))


def test_double_substitution_examples():
    a = nested({(2, -1): 1}, "x2", "x1")
    assert double_substitution_roundtrip(a, fg_builtin("additive")).ok
    b = nested({(-1, 0): 1}, "x2", "x1")
    assert double_substitution_roundtrip(b, fg_builtin("multiplicative")).ok
    one = nested({(0, 0): 1}, "x2", "x1")
    assert double_substitution_roundtrip(one, fg_builtin("multiplicative")).ok


polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), rationals, max_size=5)


@settings(max_examples=30, deadline=None)
@given(polys, polys, nonzero_rationals, nonzero_rationals)
def test_iota_is_multiplicative(n1, n2, c1, c2):
    names = ("x1", "x2")
    A = BiSeries.from_dict(n1, names, convention="PP")
    B = BiSeries.from_dict(n2, names, convention="PP")
    d1 = BiSeries.from_dict({(1, 0): 1, (0, 1): -c1}, names, convention="PP")
    d2 = BiSeries.from_dict({(1, 0): 1, (0, 1): -c2}, names, convention="PP")
    AB = BiSeries.from_dict(_mul(n1, n2), names, convention="PP")
    D = BiSeries.from_dict(_mul({(1, 0): 1, (0, 1): -c1}, {(1, 0): 1, (0, 1): -c2}), names, convention="PP")
    N = 6
    whole = iota_expand(AB, D, names, N).series
    parts = (iota_expand(A, d1, names, N).series * iota_expand(B, d2, names, N).series).truncate(N)
    assert whole.agrees(parts)


@settings(max_examples=30, deadline=None)
@given(polys, polys)
def test_iota_directions_agree_on_power_series(num, den):
    # 1 + x1*x2*(...) keeps each leading row a monomial in both directions
    den = {k: v for k, v in den.items() if k[0] > 0 and k[1] > 0}
    den[(0, 0)] = Fraction(1)
    names = ("x1", "x2")
    A = BiSeries.from_dict(num, names, convention="PP")
    D = BiSeries.from_dict(den, names, convention="PP")
    one = iota_expand(A, D, ("x1", "x2"), 6).to_dict()
    two = {(i, j): c for (j, i), c in iota_expand(A, D, ("x2", "x1"), 6).to_dict().items()}
    common = {k for k in set(one) | set(two) if max(k) < 6}
    assert {k: one.get(k, 0) for k in common} == {k: two.get(k, 0) for k in common}


@settings(max_examples=20, deadline=None)
@given(polys, gseries(order=6))
def test_substitution_composes(a, g):
    # a(F(x0, x2), x2) then x0 = g(y) equals a(F(g(y), x2), x2)
    N = 6
    F = fg_builtin("multiplicative").poly
    A = MPoly(2, a, N)
    x0, x2, y = MPoly.gens(3, N)
    gy = MPoly.from_univariate(g, 3, 2)
    step = A.substitute([F.substitute([x0, x2], N), x2], N)
    first = step.substitute([gy, MPoly.gens(3, N)[1], y], N)
    direct = A.substitute([F.substitute([gy, x2], N), x2], N)
    assert first == direct


def _mul(a, b):
    out = {}
    for (i, j), c in a.items():
        for (k, l), d in b.items():
            out[(i + k, j + l)] = out.get((i + k, j + l), 0) + c * d
    return {k: v for k, v in out.items() if v}
