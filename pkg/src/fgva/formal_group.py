"""One-dimensional formal group laws over Q and their logarithms.

A law is stored as an :class:`~fgva.bivar.MPoly` in (x, y) known modulo
total degree ``order`` (``INF`` for the polynomial laws x+y and x+y+xy).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .bivar import BiSeries, MPoly
from .errors import DomainViolation, PrecisionExhausted
from .literals import format_multivariate, parse_multivariate
from .report import CheckReport
from .series import INF, LaurentSeries, compose, is_gseries, reversion, var_series

ALIASES = {
    "additive": "additive", "add": "additive", "a": "additive", "F_a": "additive",
    "multiplicative": "multiplicative", "mult": "multiplicative", "m": "multiplicative",
    "F_m": "multiplicative",
}


class FormalGroupLaw:
    """A validated formal group law F(x, y).

    Construction runs :func:`fg_check` at the stated order and refuses
    anything that fails, so every instance satisfies the unit, associativity
    and commutativity laws to its precision.
    """

    def __init__(self, poly: MPoly, name=None, order=None, log=None):
        if poly.nvars != 2:
            raise ValueError("a group law has two variables")
        if order is not None:
            poly = poly.truncate(order)
        self.poly = poly
        self.order = poly.order
        self.name = name or format_multivariate(poly.coeffs, ("x", "y"))
        self._log = {}
        if log is not None:
            self._log[log.order] = log
        report = fg_check(poly, None if poly.order == INF else poly.order, name=self.name)
        if not report.ok:
            raise DomainViolation(f"not a formal group law: {report.text()}")
        self.validated = True

    def __repr__(self):
        o = "" if self.order == INF else f", order={self.order}"
        return f"FormalGroupLaw({self.name!r}{o})"

    def __eq__(self, other):
        return isinstance(other, FormalGroupLaw) and self.poly == other.poly

    __hash__ = None

    @property
    def is_exact(self):
        return self.order == INF

    def coefficient(self, i, j):
        return self.poly.coeffs.get((i, j), Fraction(0))

    def bivariate(self, vars=("x", "y")) -> BiSeries:
        return BiSeries.from_mpoly(self.poly, vars)

    def nested(self, names=("x", "y"), order=None):
        """F(names[0], names[1]) as a nested series with ``names[1]`` outermost."""
        p = self.poly if order is None or self.poly.order != INF else self.poly
        if order is not None and self.poly.order != INF:
            p = self.poly.truncate(order)
        return p.to_nested(names)

    def log(self, order=None) -> LaurentSeries:
        return fg_log(self, order)

    def difference_series(self, order) -> MPoly:
        """f^{-1}(f(x1) - f(x2)) modulo total degree ``order``."""
        if self.name == "x + y":
            return MPoly(2, {(1, 0): 1, (0, 1): -1})
        f = self.log(order)
        finv = reversion(f, order)
        x1 = MPoly.from_univariate(f, 2, 0)
        x2 = MPoly.from_univariate(f, 2, 1)
        return MPoly.from_univariate(finv, 1, 0).substitute([(x1 - x2).truncate(order)])

    def text(self):
        orders = None if self.order == INF else None
        body = format_multivariate(self.poly.coeffs, ("x", "y"))
        if self.order != INF:
            body += f" + O(deg {self.order})"
        return body


def _additive_poly():
    return MPoly(2, {(1, 0): 1, (0, 1): 1})


def _additive():
    return FormalGroupLaw(MPoly(2, {(1, 0): 1, (0, 1): 1}), "x + y")


def _multiplicative():
    return FormalGroupLaw(MPoly(2, {(1, 0): 1, (0, 1): 1, (1, 1): 1}), "x + y + x*y")


_BUILTINS = {}


def fg_builtin(name) -> FormalGroupLaw:
    """The additive law x+y or the multiplicative law x+y+xy."""
    key = ALIASES.get(name)
    if key is None:
        raise ValueError(f"unknown builtin group {name!r}")
    if key not in _BUILTINS:
        _BUILTINS[key] = _additive() if key == "additive" else _multiplicative()
    return _BUILTINS[key]


def parse_group(text, order=None) -> FormalGroupLaw:
    """A builtin name or a literal in x and y such as ``"x + y + x*y"``."""
    if text in ALIASES:
        return fg_builtin(text)
    coeffs, orders = parse_multivariate(text, ("x", "y"))
    o = min(orders.values())
    if order is not None:
        o = min(o, order)
    return FormalGroupLaw(MPoly(2, coeffs, o), order=None)


def _series_to_mpoly(f, nvars=1, index=0):
    return MPoly.from_univariate(f, nvars, index)


def fg_log(F: FormalGroupLaw, order=None) -> LaurentSeries:
    """The logarithm f with f(F(x, y)) = f(x) + f(y), modulo x^order.

    Computed as the integral of 1/(dF/dy)(t, 0); the defining identity is
    re-verified to total degree ``order`` before returning.
    """
    if order is None:
        if F.order == INF and F.poly == _additive_poly():
            return var_series("x")
        if F.order == INF:
            raise PrecisionExhausted("the logarithm of an exact law needs an order")
        order = F.order
    if order > F.order:
        raise PrecisionExhausted(f"law known only to total degree {F.order}")
    cached = F._log.get(order)
    if cached is not None:
        return cached
    for o, f in F._log.items():
        if o >= order:
            return f.truncate(order)
    # dF/dy at y = 0, known modulo x^(order-1)
    dy = LaurentSeries({i: c for (i, j), c in F.poly.coeffs.items() if j == 1}, order - 1, "x")
    f = dy.inverse(order=order - 1).integral()
    if not is_gseries(f):
        raise DomainViolation("dF/dy(0, 0) must be 1")
    _verify_log(F, f, order)
    F._log[order] = f
    return f


def _verify_log(F, f, order):
    fm = MPoly.from_univariate(f, 1, 0)
    x, y = MPoly.gens(2, order)
    lhs = fm.substitute([F.poly.truncate(order)])
    rhs = fm.substitute([x]) + fm.substitute([y])
    diff = lhs.first_difference(rhs, order)
    if diff is not None:
        raise ArithmeticError(f"logarithm identity fails at {diff[0]}")


def fg_from_log(f: LaurentSeries, order: int) -> FormalGroupLaw:
    """F = f^{-1}(f(x) + f(y)) modulo total degree ``order``."""
    if not is_gseries(f):
        raise DomainViolation("a logarithm must satisfy f(0) = 0 and f'(0) = 1")
    if f.order < order:
        raise PrecisionExhausted(f"f is known only modulo x^{f.order}")
    finv = reversion(f, order)
    fx = MPoly.from_univariate(f.truncate(order), 2, 0)
    fy = MPoly.from_univariate(f.truncate(order), 2, 1)
    poly = MPoly.from_univariate(finv, 1, 0).substitute([fx + fy], order)
    return FormalGroupLaw(poly, log=f.truncate(order))


def fg_conjugate(F: FormalGroupLaw, g: LaurentSeries, order: int) -> FormalGroupLaw:
    """F_g(x, y) = g^{-1}(F(g(x), g(y))) modulo total degree ``order``."""
    if not is_gseries(g):
        raise DomainViolation("conjugation needs g(0) = 0 and g'(0) = 1")
    if g.order < order:
        raise PrecisionExhausted(f"g is known only modulo x^{g.order}")
    ginv = reversion(g.truncate(order), order)
    gx = MPoly.from_univariate(g.truncate(order), 2, 0)
    gy = MPoly.from_univariate(g.truncate(order), 2, 1)
    inner = F.poly.truncate(order).substitute([gx, gy], order)
    poly = MPoly.from_univariate(ginv, 1, 0).substitute([inner], order)
    return FormalGroupLaw(poly)


def fg_check(F, order=None, name=None) -> CheckReport:
    """Unit laws, commutativity and associativity to total degree ``order``.

    Accepts an :class:`MPoly`, a :class:`FormalGroupLaw`, a BiSeries or a
    literal.  Never raises on bad input; the verdict says what failed.
    """
    if isinstance(F, FormalGroupLaw):
        poly = F.poly
        name = name or F.name
    elif isinstance(F, BiSeries):
        poly = MPoly(2, {k: v for k, v in F.to_dict().items()})
    elif isinstance(F, str):
        coeffs, orders = parse_multivariate(F, ("x", "y"))
        poly = MPoly(2, coeffs, min(orders.values()))
        name = name or F
    else:
        poly = F
    n = poly.order if order is None else min(order, poly.order)
    if n == INF:
        deg = max((sum(k) for k in poly.coeffs), default=1)
        n = 2 * deg * deg + 2
    window = {"total_degree": n}
    inputs = {"F": name or format_multivariate(poly.coeffs, ("x", "y"))}
    P = poly.truncate(n)
    # unit laws: F(x, 0) = x and F(0, y) = y
    for key, c in sorted(P.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0])):
        i, j = key
        if j == 0 and (c != (1 if i == 1 else 0)):
            return CheckReport.failed("fg-check", inputs, window, key, c, 1 if i == 1 else 0, law="unit")
        if i == 0 and (c != (1 if j == 1 else 0)):
            return CheckReport.failed("fg-check", inputs, window, key, c, 1 if j == 1 else 0, law="unit")
    for k in ((1, 0), (0, 1)):
        if P.coeffs.get(k) != 1 and sum(k) < n:
            return CheckReport.failed("fg-check", inputs, window, k, P.coeffs.get(k, 0), 1, law="unit")
    x, y, z = MPoly.gens(3, n)
    Fxy = P.substitute([x, y], n)
    Fyz = P.substitute([y, z], n)
    left = P.substitute([Fxy, z], n)
    right = P.substitute([x, Fyz], n)
    diff = left.first_difference(right)
    if diff is not None:
        return CheckReport.failed("fg-check", inputs, window, diff[0], diff[1], diff[2], law="associativity")
    swapped = MPoly(2, {(j, i): c for (i, j), c in P.coeffs.items()}, P.order)
    diff = P.first_difference(swapped)
    if diff is not None:
        return CheckReport.failed("fg-check", inputs, window, diff[0], diff[1], diff[2], law="commutativity")
    return CheckReport.passed("fg-check", inputs, window)


def tanh_law(order) -> FormalGroupLaw:
    """(x + y)/(1 + xy), the law with logarithm artanh x = x + x^3/3 + x^5/5 + ..."""
    f = LaurentSeries({n: Fraction(1, n) for n in range(1, order + 1, 2)}, order + 1, "x")
    F = fg_from_log(f, order)
    F.name = "(x + y)/(1 + x*y)"
    return F


def canonical_group(F: FormalGroupLaw) -> FormalGroupLaw:
    """The builtin law equal to F to F's precision, else F itself."""
    for name in ("additive", "multiplicative"):
        B = fg_builtin(name)
        n = F.order
        if all(F.poly.coeffs.get(k, 0) == v for k, v in B.poly.coeffs.items() if sum(k) < n) and all(
                B.poly.coeffs.get(k, 0) == v for k, v in F.poly.coeffs.items()):
            return B
    return F
