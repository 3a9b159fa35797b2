"""Hypothesis strategies for exact series."""

from fractions import Fraction

from hypothesis import strategies as st

from fgva.series import LaurentSeries

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 5))
nonzero_rationals = rationals.filter(bool)


@st.composite
def laurent(draw, low=-3, high=5, order=None, var="x"):
    """A Laurent series with support in [low, high], exact or known modulo var^order."""
    coeffs = draw(st.dictionaries(st.integers(low, high), rationals, max_size=5))
    return LaurentSeries(coeffs, float("inf") if order is None else order, var)


@st.composite
def power_series(draw, order=8, var="x"):
    coeffs = draw(st.dictionaries(st.integers(0, order - 1), rationals, max_size=6))
    return LaurentSeries(coeffs, order, var)


@st.composite
def gseries(draw, order=10, var="x"):
    """g = x + higher terms, known modulo var^order."""
    coeffs = {1: Fraction(1)}
    coeffs.update(draw(st.dictionaries(st.integers(2, order - 1), rationals, max_size=4)))
    return LaurentSeries(coeffs, order, var)
