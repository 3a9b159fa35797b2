"""Text form of series: parsing and printing with exact round trip.

Grammar (whitespace is ignored)::

    series  := term (("+"|"-") term)* ["+" "O(" ident "^" int ("," ident "^" int)* ")"]
    term    := rat ["*" mono] | mono | rat
    mono    := ident ["^" int] ("*" ident ["^" int])*
    rat     := ["-"] digits ["/" digits]

>>> s = parse_series("x + 1/3*x^3 + 1/5*x^5 + O(x^7)")
>>> format_series(s)
'x + 1/3*x^3 + 1/5*x^5 + O(x^7)'
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import LiteralError
from .series import INF, LaurentSeries

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _tokens(text):
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        num, ident, sym = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif ident is not None:
            out.append(("id", ident))
        elif sym.strip():
            out.append(("sym", sym))
        pos = m.end()
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[self.i + k]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind, value=None):
        t = self.take()
        if t[0] != kind or (value is not None and t[1] != value):
            raise LiteralError(f"malformed series literal {self.text!r}: expected {value or kind}")
        return t

    def integer(self):
        sign = 1
        if self.peek() == ("sym", "-"):
            self.take()
            sign = -1
        return sign * self.expect("num")[1]

    def rational(self):
        n = self.expect("num")[1]
        if self.peek() == ("sym", "/"):
            self.take()
            d = self.expect("num")[1]
            if d == 0:
                raise LiteralError(f"zero denominator in {self.text!r}")
            return Fraction(n, d)
        return Fraction(n)

    def factor(self):
        name = self.expect("id")[1]
        e = 1
        if self.peek() == ("sym", "^"):
            self.take()
            e = self.integer()
        return name, e

    def monomial(self):
        mono = {}
        name, e = self.factor()
        mono[name] = mono.get(name, 0) + e
        while self.peek() == ("sym", "*") and self.peek(1)[0] == "id":
            self.take()
            name, e = self.factor()
            mono[name] = mono.get(name, 0) + e
        return mono

    def term(self):
        t = self.peek()
        if t[0] == "num":
            c = self.rational()
            if self.peek() == ("sym", "*"):
                self.take()
                return c, self.monomial()
            return c, {}
        if t[0] == "id":
            if t[1] == "O" and self.peek(1) == ("sym", "("):
                return None
            return Fraction(1), self.monomial()
        raise LiteralError(f"malformed series literal {self.text!r}")

    def big_o(self):
        self.expect("id", "O")
        self.expect("sym", "(")
        orders = {}
        while True:
            name, e = self.factor()
            orders[name] = e
            if self.peek() == ("sym", ","):
                self.take()
                continue
            break
        self.expect("sym", ")")
        return orders

    def parse(self):
        terms = []
        orders = {}
        sign = Fraction(1)
        if self.peek() == ("sym", "-"):
            self.take()
            sign = Fraction(-1)
        elif self.peek() == ("sym", "+"):
            self.take()
        while True:
            if self.peek()[0] == "id" and self.peek()[1] == "O" and self.peek(1) == ("sym", "("):
                if sign != 1:
                    raise LiteralError(f"precision marker must be added in {self.text!r}")
                orders = self.big_o()
                break
            t = self.term()
            c, mono = t
            terms.append((sign * c, mono))
            nxt = self.peek()
            if nxt == ("sym", "+"):
                self.take()
                sign = Fraction(1)
            elif nxt == ("sym", "-"):
                self.take()
                sign = Fraction(-1)
            else:
                break
        if self.peek()[0] != "end":
            raise LiteralError(f"unexpected trailing text in {self.text!r}")
        return terms, orders


def parse_terms(text):
    """List of (coefficient, {var: exp}) terms and the {var: order} markers."""
    if not isinstance(text, str) or not text.strip():
        raise LiteralError("empty series literal")
    return _Parser(text).parse()


def parse_series(text, var=None) -> LaurentSeries:
    """Parse a univariate literal.  Without an O() marker the series is exact."""
    terms, orders = parse_terms(text)
    names = {n for _, mono in terms for n in mono} | set(orders)
    if len(names) > 1:
        raise LiteralError(f"univariate literal mentions {sorted(names)}")
    name = names.pop() if names else (var or "x")
    if var is not None and name != var:
        raise LiteralError(f"literal uses variable {name!r}, expected {var!r}")
    coeffs = {}
    for c, mono in terms:
        e = mono.get(name, 0)
        coeffs[e] = coeffs.get(e, 0) + c
    order = orders.get(name, INF)
    for e in coeffs:
        if e >= order and coeffs[e]:
            raise LiteralError(f"term {name}^{e} lies beyond O({name}^{order})")
    return LaurentSeries(coeffs, order, name)


def parse_multivariate(text, variables):
    """Parse a literal in several variables.

    Returns ``(coeffs, orders)`` with ``coeffs`` keyed by exponent tuples in
    the order of ``variables``.
    """
    terms, orders = parse_terms(text)
    for _, mono in terms:
        for n in mono:
            if n not in variables:
                raise LiteralError(f"unknown variable {n!r} (expected {list(variables)})")
    for n in orders:
        if n not in variables:
            raise LiteralError(f"unknown variable {n!r} in O() marker")
    coeffs = {}
    for c, mono in terms:
        key = tuple(mono.get(v, 0) for v in variables)
        coeffs[key] = coeffs.get(key, 0) + c
    return {k: v for k, v in coeffs.items() if v}, {v: orders.get(v, INF) for v in variables}


def _mono_text(mono):
    parts = []
    for name, e in mono:
        if e == 0:
            continue
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _join(terms, markers):
    if not terms and not markers:
        return "0"
    out = ""
    for c, mono in terms:
        body = _mono_text(mono)
        mag = abs(c)
        if body:
            piece = body if mag == 1 else f"{format_rational(mag)}*{body}"
        else:
            piece = format_rational(mag)
        if not out:
            out = ("-" if c < 0 else "") + piece
        else:
            out += (" - " if c < 0 else " + ") + piece
    if markers:
        mark = "O(" + ", ".join(f"{n}^{e}" for n, e in markers) + ")"
        out = mark if not out else out + " + " + mark
    return out


def format_series(s: LaurentSeries) -> str:
    """Canonical text of a univariate series with rational coefficients."""
    for c in s.coeffs.values():
        if not isinstance(c, Fraction):
            raise TypeError("format_series needs rational coefficients")
    terms = [(c, ((s.var, e),)) for e, c in s.items()]
    markers = [] if s.order == INF else [(s.var, s.order)]
    return _join(terms, markers)


def format_multivariate(coeffs, variables, orders=None) -> str:
    """Canonical text of a multivariate table keyed by exponent tuples.

    Terms are sorted by the exponent of the last variable, then the earlier ones.
    """
    keys = sorted(coeffs, key=lambda k: tuple(reversed(k)))
    terms = [(Fraction(coeffs[k]), tuple(zip(variables, k))) for k in keys if coeffs[k]]
    markers = []
    if orders:
        markers = [(v, orders[v]) for v in variables if orders.get(v, INF) != INF]
    return _join(terms, markers)


def flatten(series, variables=None):
    """Exponent-tuple table of a nested series, with variables outermost first."""
    from .series import nested_vars

    if variables is None:
        variables = nested_vars(series)
    out = {}

    def walk(s, prefix):
        if isinstance(s, LaurentSeries):
            for e, c in s.coeffs.items():
                walk(c, prefix + ((s.var, e),))
        else:
            d = dict(prefix)
            out[tuple(d.get(v, 0) for v in variables)] = s

    walk(series, ())
    return out, tuple(variables)
