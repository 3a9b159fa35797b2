"""Exact truncated Laurent series with precision carried on every value.

A :class:`LaurentSeries` is a finite set of coefficients together with an
``order``: the series is known modulo ``var**order``.  Exact (fully known)
series use ``order = INF``.  Every exponent below ``order`` that is not
stored has coefficient exactly zero.

Coefficients are usually :class:`fractions.Fraction` but may be anything with
``+``, ``-`` and scalar multiplication, including another series.  A series
whose coefficients are series in a second variable represents an element of
``K((inner))((outer))``; this nesting is how the two- and three-variable
objects elsewhere in the package are built.  Binary operations look at the
variable names to decide which operand is the outer one.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import (
    DivisionByIndeterminate,
    DomainViolation,
    PrecisionExhausted,
    ResidueObstruction,
)

INF = math.inf
ONE = Fraction(1)
ZERO = Fraction(0)


def exact_zero(c) -> bool:
    """True if ``c`` is zero with no precision caveat."""
    f = getattr(c, "is_exact_zero", None)
    if f is not None:
        return f()
    return c == 0


def as_scalar(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    return c


def nested_vars(s) -> tuple:
    """Variable names from the outermost level inwards."""
    out = []
    while isinstance(s, LaurentSeries):
        out.append(s.var)
        nxt = None
        for c in s.coeffs.values():
            nxt = c
            break
        s = nxt
    return tuple(out)


def _is_inner(a, b) -> bool:
    """True if series ``b`` lives strictly inside the coefficients of ``a``."""
    return isinstance(b, LaurentSeries) and b.var != a.var and b.var in nested_vars(a)[1:]


class LaurentSeries:
    """Univariate Laurent series known modulo ``var**order``.

    >>> x = LaurentSeries.monomial(1)
    >>> (1 + x) * (1 - x)
    LaurentSeries('1 - x^2')
    """

    __slots__ = ("var", "coeffs", "order")

    def __init__(self, coeffs=None, order=INF, var="x", low=0):
        if order != INF:
            order = int(order)
        data = {}
        if coeffs is not None:
            items = coeffs.items() if hasattr(coeffs, "items") else enumerate(coeffs, low)
            for e, c in items:
                e = int(e)
                if e >= order:
                    continue
                c = as_scalar(c)
                if not exact_zero(c):
                    data[e] = c
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "coeffs", data)
        object.__setattr__(self, "order", order)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentSeries is immutable")

    def __reduce__(self):
        return (LaurentSeries, (self.coeffs, self.order, self.var))

    @classmethod
    def monomial(cls, exp, coeff=1, var="x", order=INF):
        return cls({exp: coeff}, order=order, var=var)

    @classmethod
    def zero(cls, order=INF, var="x"):
        return cls({}, order=order, var=var)

    @classmethod
    def constant(cls, c, var="x", order=INF):
        return cls({0: c}, order=order, var=var)

    def _new(self, coeffs, order, var=None):
        return LaurentSeries(coeffs, order, var or self.var)

    # inspection
    @property
    def low(self):
        """Least exponent that may carry a nonzero coefficient."""
        if self.coeffs:
            return min(self.coeffs)
        return self.order

    @property
    def high(self):
        return max(self.coeffs) if self.coeffs else None

    def valuation(self):
        """Exponent of the first known-nonzero coefficient, or None."""
        for e in sorted(self.coeffs):
            if self.coeffs[e]:
                return e
        return None

    def is_exact(self):
        return self.order == INF

    def is_exact_zero(self):
        return not self.coeffs and self.order == INF

    def __bool__(self):
        return any(bool(c) for c in self.coeffs.values())

    def __getitem__(self, e):
        if e >= self.order:
            raise PrecisionExhausted(f"coefficient of {self.var}^{e} is beyond order {self.order}")
        return self.coeffs.get(e, ZERO)

    def coefficient(self, e, default=ZERO):
        return self.coeffs.get(e, default)

    def items(self):
        return sorted(self.coeffs.items())

    def __iter__(self):
        return iter(self.items())

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, LaurentSeries):
            return self.var == other.var and self.order == other.order and self.coeffs == other.coeffs
        if isinstance(other, (int, Rational)) and self.order == INF:
            return self.coeffs == ({0: Fraction(other)} if other else {})
        return NotImplemented

    __hash__ = None

    def agrees(self, other, upto=None):
        """True if both series agree on every exponent known to both (and below ``upto``)."""
        n = min(self.order, other.order)
        if upto is not None:
            n = min(n, upto)
        for e in set(self.coeffs) | set(other.coeffs):
            if e < n and bool(self.coeffs.get(e, ZERO) - other.coeffs.get(e, ZERO)):
                return False
        return True

    def __repr__(self):
        from .literals import format_series

        try:
            return f"LaurentSeries({format_series(self)!r})"
        except TypeError:
            return f"LaurentSeries({self.coeffs!r}, order={self.order}, var={self.var!r})"

    def __str__(self):
        from .literals import format_series

        try:
            return format_series(self)
        except TypeError:
            return repr(self)

    # precision bookkeeping
    def truncate(self, n):
        """Forget everything from ``var**n`` on."""
        if n >= self.order:
            return self
        return self._new({e: c for e, c in self.coeffs.items() if e < n}, n)

    def exactify(self):
        """Declare the stored coefficients complete."""
        return self._new(self.coeffs, INF)

    def map(self, fn, var=None):
        return LaurentSeries({e: fn(c) for e, c in self.coeffs.items()}, self.order, var or self.var)

    def rename(self, var):
        return self._new(self.coeffs, self.order, var)

    def shift(self, k):
        """Multiply by ``var**k``."""
        return self._new({e + k: c for e, c in self.coeffs.items()}, self.order + k)

    # ring operations
    def __neg__(self):
        return self._new({e: -c for e, c in self.coeffs.items()}, self.order)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, LaurentSeries):
            if other.var != self.var:
                if _is_inner(other, self):
                    return other.__add__(self)
                other = LaurentSeries.constant(other, self.var)
        else:
            if isinstance(other, (int, Rational, str)):
                other = as_scalar(other)
            other = LaurentSeries.constant(other, self.var)
        n = min(self.order, other.order)
        out = {e: c for e, c in self.coeffs.items() if e < n}
        for e, c in other.coeffs.items():
            if e >= n:
                continue
            out[e] = out[e] + c if e in out else c
        return self._new(out, n)

    def __radd__(self, other):
        return self + other

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s, left=False):
        """Multiply every coefficient by ``s`` (on the left if ``left``)."""
        if left:
            return self._new({e: s * c for e, c in self.coeffs.items()}, self.order)
        return self._new({e: c * s for e, c in self.coeffs.items()}, self.order)

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            if other.var != self.var:
                if _is_inner(other, self):
                    return other.scale(self, left=True)
                return self.scale(other)
        else:
            if isinstance(other, (int, Rational)):
                other = Fraction(other)
            return self.scale(other)
        a, b = self, other
        order = min(a.low + b.order, b.low + a.order)
        out = {}
        for ea, ca in a.coeffs.items():
            for eb, cb in b.coeffs.items():
                e = ea + eb
                if e >= order:
                    continue
                p = ca * cb
                out[e] = out[e] + p if e in out else p
        return self._new(out, order)

    def __rmul__(self, other):
        if isinstance(other, (int, Rational)):
            other = Fraction(other)
        return self.scale(other, left=True)

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries) and other.var == self.var:
            need = None
            if self.order != INF:
                need = self.order - self.low + other.low + 1
            return self * other.inverse(order=need)
        if isinstance(other, (int, Rational)):
            if other == 0:
                raise ZeroDivisionError("division of a series by zero")
            return self.scale(ONE / Fraction(other))
        if isinstance(other, LaurentSeries):
            return self.scale(other.inverse())
        raise TypeError(f"cannot divide a series by {type(other).__name__}")

    def leading(self):
        """(exponent, coefficient) of the first term, which must be known nonzero."""
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            if c:
                return e, c
            raise DivisionByIndeterminate(
                f"coefficient of {self.var}^{e} vanishes only to its stated precision")
        raise DivisionByIndeterminate(f"series is zero modulo {self.var}^{self.order}")

    def inverse(self, order=None):
        """Multiplicative inverse.

        The result is known modulo ``var**(order_self - 2*v)`` where ``v`` is
        the valuation.  An exact series that is not a monomial has an infinite
        inverse, so ``order`` (the wanted result order) must then be given.
        """
        v, c0 = self.leading()
        rel = self.order - v
        if rel == INF:
            if len(self.coeffs) == 1:
                return self._new({-v: _inv(c0)}, INF)
            if order is None:
                raise PrecisionExhausted("inverse of an exact non-monomial series needs an order")
            rel = order + v
        elif order is not None:
            rel = min(rel, order + v)
        rel = int(rel)
        if rel <= 0:
            raise PrecisionExhausted("no coefficient of the inverse is determined")
        inv0 = _inv(c0)
        unit = {e - v: c for e, c in self.coeffs.items() if 0 < e - v < rel}
        b = [inv0]
        for k in range(1, rel):
            s = None
            for i, ai in unit.items():
                if i <= k:
                    t = ai * b[k - i]
                    s = t if s is None else s + t
            b.append(ZERO if s is None else -(inv0 * s))
        return self._new({k - v: bk for k, bk in enumerate(b)}, rel - v)

    def __pow__(self, n):
        return self.pow(n)

    def pow(self, n, order=None):
        """Integer power; negative powers go through :meth:`inverse`.

        ``order`` truncates the result and is needed for negative powers of
        exact non-monomials.
        """
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            inv_order = None
            if order is not None:
                v = self.leading()[0]
                inv_order = order - (-n - 1) * (-v)
            return self.inverse(order=inv_order).pow(-n, order)
        result = LaurentSeries.constant(ONE, self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        if order is not None:
            result = result.truncate(order)
        return result

    # calculus
    def derivative(self):
        out = {e - 1: e * c for e, c in self.coeffs.items() if e != 0}
        return self._new(out, self.order - 1)

    def integral(self):
        """Antiderivative with zero constant term."""
        if self.order <= -1:
            raise PrecisionExhausted(f"the {self.var}^-1 coefficient is unknown")
        if -1 in self.coeffs:
            raise ResidueObstruction(f"series has a nonzero {self.var}^-1 term")
        out = {e + 1: c / (e + 1) for e, c in self.coeffs.items()}
        return self._new(out, self.order + 1)

    def compose(self, g, order=None):
        return compose(self, g, order)

    def __call__(self, g, order=None):
        return compose(self, g, order)


def _inv(c):
    if isinstance(c, LaurentSeries):
        return c.inverse()
    return ONE / as_scalar(c)


def var_series(var="x"):
    return LaurentSeries.monomial(1, var=var)


def polynomial(coeffs, var="x", low=0):
    """Exact series from a coefficient list starting at ``var**low``."""
    return LaurentSeries(coeffs, INF, var, low)


def log1p_series(order, var="x"):
    """log(1+x) modulo x^order."""
    return LaurentSeries({n: Fraction((-1) ** (n - 1), n) for n in range(1, order)}, order, var)


def expm1_series(order, var="x"):
    """e^x - 1 modulo x^order."""
    out = {}
    f = 1
    for n in range(1, order):
        f *= n
        out[n] = Fraction(1, f)
    return LaurentSeries(out, order, var)


def exp_series(order, var="x", scale=1):
    """e^(scale*x) modulo x^order."""
    scale = as_scalar(scale)
    out = {}
    f = 1
    p = ONE
    for n in range(order):
        if n:
            f *= n
            p *= scale
        out[n] = p / f
    return LaurentSeries(out, order, var)


def geometric_series(order, var="x", ratio=1):
    """1/(1 - ratio*x) modulo x^order."""
    ratio = as_scalar(ratio)
    return LaurentSeries({n: ratio ** n for n in range(order)}, order, var)


def exp(a: LaurentSeries, order=None) -> LaurentSeries:
    """Exponential of a series with no constant term, via f' = a'f."""
    if any(e <= 0 for e in a.coeffs):
        raise DomainViolation("exp needs a series without constant or negative terms")
    n = a.order if order is None else min(a.order, order)
    if n == INF:
        if not a.coeffs:
            return LaurentSeries.constant(ONE, a.var)
        raise PrecisionExhausted("exp of an exact nonzero series needs an order")
    n = int(n)
    if n <= 0:
        raise DomainViolation("exp needs a known constant term")
    ka = {e: e * c for e, c in a.coeffs.items() if e < n}
    out = [ONE]
    for m in range(1, n):
        s = ZERO
        for k, kc in ka.items():
            if k <= m:
                s += kc * out[m - k]
        out.append(s / m)
    return LaurentSeries(out, n, a.var)


def log(a: LaurentSeries, order=None) -> LaurentSeries:
    """Logarithm of a power series with constant term 1."""
    if any(e < 0 for e in a.coeffs) or a.order <= 0 or a.coeffs.get(0) != 1:
        raise DomainViolation("log needs a power series with constant term 1")
    n = a.order if order is None else min(a.order, order)
    if n == INF:
        if len(a.coeffs) == 1:
            return LaurentSeries.zero(var=a.var)
        raise PrecisionExhausted("log of an exact non-constant series needs an order")
    n = int(n)
    a = a.truncate(n)
    quotient = a.derivative() * a.inverse(order=n)
    return quotient.truncate(n - 1).integral()


def compose(h: LaurentSeries, g: LaurentSeries, order=None) -> LaurentSeries:
    """h(g(x)) for g of positive valuation with a known-nonzero leading term.

    If g = c x^k + ... is known modulo x^N, the result is known modulo
    ``min(ord(h)*k, e*k + N - k)`` over the exponents e of h, which is what
    the term-by-term products below produce.  ``order`` can lower this
    further and is required when exact inputs would give an infinite result.
    Coefficients of ``h`` may themselves be series in other variables.
    """
    if g.var != h.var:
        g = g.rename(h.var)
    k, _ = g.leading()
    if k < 1:
        raise DomainViolation("substituted series must have positive valuation")
    cap = h.order * k if h.order != INF else INF
    if order is not None:
        cap = min(cap, order)
    need = sorted(e for e in h.coeffs if e * k < cap)
    if not need:
        return LaurentSeries.zero(cap, h.var)
    lo, hi = need[0], need[-1]
    if cap == INF and g.order == INF and len(g.coeffs) > 1 and lo < 0:
        raise PrecisionExhausted("negative powers of an exact non-monomial need an order")
    powers = {}
    if hi >= 0:
        p = LaurentSeries.constant(ONE, h.var)
        for m in range(0, hi + 1):
            if m:
                p = (p * g).truncate(cap)
            powers[m] = p
    if lo < 0:
        # each later factor g^-1 lowers exponents by k, so keep headroom
        def room(m):
            return cap if cap == INF else cap + (-lo - m) * k

        ginv = g.inverse(order=None if cap == INF else room(1) + k)
        p = LaurentSeries.constant(ONE, h.var)
        for m in range(1, -lo + 1):
            p = (p * ginv).truncate(room(m))
            powers[-m] = p
    result = None
    for e in need:
        term = powers[e] * h.coeffs[e]
        result = term if result is None else result + term
    return result.truncate(cap)


def reversion(g: LaurentSeries, order: int) -> LaurentSeries:
    """Compositional inverse of g = x + O(x^2) modulo x^order.

    Uses Lagrange inversion: [x^n] g^{-1} = [x^{n-1}] (x/g)^n / n.  Both
    round trips are checked before returning.
    """
    if order < 2:
        raise PrecisionExhausted("reversion needs order >= 2")
    if not is_gseries(g):
        raise DomainViolation("reversion needs g(0) = 0 and g'(0) = 1")
    if g.order < order:
        raise PrecisionExhausted(f"g is known only modulo {g.var}^{g.order}")
    q = g.shift(-1).truncate(order - 1).inverse(order=order - 1)
    out = {1: ONE}
    p = q
    for n in range(2, order):
        p = (p * q).truncate(order - 1)
        out[n] = p.coefficient(n - 1) / n
    h = LaurentSeries(out, order, g.var)
    x = var_series(g.var)
    gt = g.truncate(order)
    if not compose(gt, h).agrees(x, order) or not compose(h, gt).agrees(x, order):
        raise ArithmeticError("reversion round trip failed")
    return h


def is_gseries(g) -> bool:
    """Member of the group G(Q[[x]]): no constant term and linear coefficient 1."""
    if not isinstance(g, LaurentSeries) or g.order < 2:
        return False
    return all(e >= 1 for e in g.coeffs) and g.coeffs.get(1) == 1


def lookup(series, exps):
    """(known, value) of the coefficient at a named-exponent assignment.

    ``series`` may be nested to any depth; ``exps`` maps each variable name
    to its exponent (missing names mean exponent 0).  ``known`` is False when
    the coefficient lies beyond the stated precision.
    """
    cur = series
    while isinstance(cur, LaurentSeries):
        e = exps.get(cur.var, 0)
        if e >= cur.order:
            return False, None
        c = cur.coeffs.get(e)
        if c is None:
            return True, ZERO
        cur = c
    return True, cur
