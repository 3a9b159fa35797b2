from fractions import Fraction
from math import comb, factorial

from hypothesis import given, settings
from hypothesis import strategies as st

from fgva import (assoc_from_p, closure_generate, compatibility_check, fg_builtin, fg_log, heisenberg_example,
                  normalization_check, y_phi_product)
from fgva.fields import compare_products, heisenberg_commutator_check, identity_field, scalar_field
from fgva.linear import Vector
from fgva.series import LaurentSeries, var_series

INF = float("inf")
SPACE, H = heisenberg_example(3, 6)
PHI = assoc_from_p(fg_builtin("additive"), var_series(), 9)
PHI_M = assoc_from_p(fg_builtin("multiplicative"), var_series(), 9)
SQUARE = "x1^2-2*x1*x2+x2^2"
ONE = identity_field(SPACE)


def test_compatibility():
    assert compatibility_check(H, H, SQUARE, PHI).ok
    r = compatibility_check(H, H, "x1-x2", PHI)
    assert r.verdict == "fail" and r.witness is not None


def test_scalar_fields_with_trivial_p():
    # on x e^z, x^-1 * x^-1 becomes x^-2 e^{-z}
    inv = scalar_field(SPACE, LaurentSeries({-1: 1}, INF, "x"), "x^-1", -1)
    got = y_phi_product(inv, inv, "1", PHI, 4).series("1")
    want = LaurentSeries({k: LaurentSeries({-2: Vector({"1": Fraction((-1) ** k, factorial(k))})}, INF, "x")
                          for k in range(4)}, 4, "z")
    assert got.agrees(want)


def test_product_with_identity_substitutes_phi():
    # Y(a, z)1 = a(x e^z): the x^e term of h(x)1 picks up e^{ez}
    got = y_phi_product(H, ONE, "1", PHI, 3).series("1")
    hx = H("1")
    for k in range(3):
        row = got.coeffs.get(k, LaurentSeries.zero())
        want = LaurentSeries({e: v * Fraction(e ** k, factorial(k)) for e, v in hx.coeffs.items() if e ** k},
                             hx.order, "x")
        assert row.agrees(want)


def test_vacuum_product():
    got = y_phi_product(ONE, H, "1", PHI, 3).series("1")
    assert got.coeffs[0].agrees(H("1"))
    assert all(not row for k, row in got.coeffs.items() if k)


def test_closure_of_identity_is_trivial():
    assert closure_generate([ONE], PHI, depth=2, z_order=3).basis == ["1"]


def test_heisenberg_bracket():
    assert heisenberg_commutator_check(SPACE).ok


def test_normalization():
    r = normalization_check(H, H, SQUARE, PHI_M, PHI, fg_log(fg_builtin("multiplicative"), 10), 4,
                            panel=SPACE.labels[:4])
    assert r.ok


def cube(k):
    return {(k - j, j): (-1) ** j * comb(k, j) for j in range(k + 1)}


@settings(max_examples=4, deadline=None)
@given(st.integers(3, 4))
def test_product_does_not_depend_on_p(k):
    a = y_phi_product(H, H, cube(2), PHI, 3)
    b = y_phi_product(H, H, cube(k), PHI, 3)
    compared, bad = compare_products(a, b, SPACE.labels[:4])
    assert compared and bad is None
