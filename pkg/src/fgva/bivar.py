"""Two-variable series, iota expansions and the substitution calculus.

Two representations live here.

* :class:`MPoly` is a multivariate power series truncated by total degree.
  It is the workhorse for formal group laws, where precision is naturally
  "modulo terms of total degree N".
* :class:`BiSeries` wraps a nested :class:`~fgva.series.LaurentSeries`
  (outer variable = second variable, inner = first) and tags it with an
  expansion convention: PP (power series in both), LP (Laurent in the first,
  power series in the second) or WW (a finite exponent window).

The substitution routines :func:`taylor_substitute` and
:func:`diagonal_substitute` work directly on nested series so they can be
reused with vector-valued coefficients by the vertex-algebra layers.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from itertools import product as iproduct

from .errors import (
    ConventionMismatch,
    PrecisionExhausted,
    UnboundedPrincipalPart,
    ZeroDenominator,
)
from .literals import format_multivariate, parse_multivariate
from .series import INF, ONE, ZERO, LaurentSeries, compose, exact_zero, lookup, nested_vars

CONVENTIONS = ("PP", "LP", "WW")


# ---------------------------------------------------------------------------
# total-degree truncated multivariate series


class MPoly:
    """Multivariate power series over Q known modulo total degree ``order``.

    >>> x, y = MPoly.gens(2)
    >>> ((x + y) ** 2).coeffs == {(2, 0): 1, (1, 1): 2, (0, 2): 1}
    True
    """

    __slots__ = ("nvars", "coeffs", "order")

    def __init__(self, nvars, coeffs=None, order=INF):
        self.nvars = nvars
        self.order = order
        c = {}
        for k, v in (coeffs or {}).items():
            k = tuple(k)
            if len(k) != nvars:
                raise ValueError("exponent tuple has the wrong length")
            if any(e < 0 for e in k):
                raise ValueError("MPoly holds power series only")
            if sum(k) >= order:
                continue
            v = Fraction(v)
            if v:
                c[k] = v
        self.coeffs = c

    @classmethod
    def _raw(cls, nvars, coeffs, order):
        """Trusted constructor: exponents valid, below ``order``, values nonzero Fractions."""
        p = cls.__new__(cls)
        p.nvars, p.coeffs, p.order = nvars, coeffs, order
        return p

    @classmethod
    def gens(cls, n, order=INF):
        return [cls(n, {tuple(int(i == j) for i in range(n)): 1}, order) for j in range(n)]

    @classmethod
    def const(cls, n, c, order=INF):
        return cls(n, {(0,) * n: c}, order)

    def truncate(self, order):
        if order >= self.order:
            return self
        return MPoly(self.nvars, self.coeffs, order)

    def __add__(self, other):
        if not isinstance(other, MPoly):
            other = MPoly.const(self.nvars, other)
        n = min(self.order, other.order)
        c = {k: v for k, v in self.coeffs.items() if sum(k) < n}
        for k, v in other.coeffs.items():
            if sum(k) < n:
                t = c.get(k, 0) + v
                if t:
                    c[k] = t
                else:
                    c.pop(k, None)
        return MPoly._raw(self.nvars, c, n)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.nvars, {k: -v for k, v in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def low_degree(self):
        return min((sum(k) for k in self.coeffs), default=self.order)

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            s = Fraction(other)
            return MPoly(self.nvars, {k: v * s for k, v in self.coeffs.items()}, self.order)
        n = min(self.low_degree() + other.order, other.low_degree() + self.order)
        c = {}
        right = [(kb, vb, sum(kb)) for kb, vb in other.coeffs.items()]
        for ka, va in self.coeffs.items():
            da = sum(ka)
            for kb, vb, db in right:
                if da + db >= n:
                    continue
                k = tuple(a + b for a, b in zip(ka, kb))
                c[k] = c.get(k, 0) + va * vb
        return MPoly._raw(self.nvars, {k: v for k, v in c.items() if v}, n)

    __rmul__ = __mul__

    def __pow__(self, m):
        result = MPoly.const(self.nvars, 1)
        base = self
        while m:
            if m & 1:
                result = result * base
            m >>= 1
            if m:
                base = base * base
        return result

    def __eq__(self, other):
        return isinstance(other, MPoly) and (self.nvars, self.order, self.coeffs) == (
            other.nvars, other.order, other.coeffs)

    __hash__ = None

    def partial(self, i):
        c = {}
        for k, v in self.coeffs.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                c[tuple(kk)] = v * k[i]
        return MPoly(self.nvars, c, self.order - 1)

    def substitute(self, args, order=None):
        """Evaluate at MPoly arguments of positive low degree (all in one ring)."""
        if len(args) != self.nvars:
            raise ValueError("wrong number of arguments")
        m = args[0].nvars
        cap = self.order * min(a.low_degree() for a in args) if self.order != INF else INF
        for a in args:
            if a.low_degree() < 1:
                raise ValueError("substituted series must have no constant term")
        cap = min([cap] + [a.order for a in args] + ([order] if order is not None else []))
        pw = [{0: MPoly.const(m, 1)} for _ in args]

        def power(i, e):
            cache = pw[i]
            if e not in cache:
                cache[e] = (power(i, e - 1) * args[i]).truncate(cap)
            return cache[e]

        # group by the first exponent so each power of args[0] is multiplied once
        groups = {}
        for k, v in self.coeffs.items():
            groups.setdefault(k[0], []).append((k[1:], v))
        out = MPoly(m, {}, cap)
        for e0, terms in groups.items():
            inner = MPoly(m, {}, cap)
            for rest, v in terms:
                term = MPoly.const(m, v, cap)
                for i, e in enumerate(rest, 1):
                    if e:
                        term = term * power(i, e)
                inner = inner + term
            out = out + (inner * power(0, e0) if e0 else inner).truncate(cap)
        return out.truncate(cap)

    def restrict(self, i, value_zero=True):
        """Set variable ``i`` to zero."""
        return MPoly(self.nvars, {k: v for k, v in self.coeffs.items() if k[i] == 0}, self.order)

    def first_difference(self, other, upto=None):
        """Smallest exponent (graded order) where the two differ within precision, or None."""
        n = min(self.order, other.order)
        if upto is not None:
            n = min(n, upto)
        keys = sorted(set(self.coeffs) | set(other.coeffs), key=lambda k: (sum(k), tuple(reversed(k))))
        for k in keys:
            if sum(k) >= n:
                continue
            a, b = self.coeffs.get(k, ZERO), other.coeffs.get(k, ZERO)
            if a != b:
                return k, a, b
        return None

    @classmethod
    def from_univariate(cls, s: LaurentSeries, nvars, index):
        """Embed a power series in variable ``index`` of an ``nvars`` ring."""
        if any(e < 0 for e in s.coeffs):
            raise ValueError("only power series embed into MPoly")
        c = {}
        for e, v in s.coeffs.items():
            k = [0] * nvars
            k[index] = e
            c[tuple(k)] = v
        return cls(nvars, c, s.order)

    def to_nested(self, names):
        """Nested LaurentSeries, ``names[-1]`` outermost.

        Row j of the outer variable keeps inner precision ``order - j``,
        which is exactly what total-degree truncation knows.
        """
        return _nest(self.coeffs, self.order, list(names))

    def __repr__(self):
        names = ["x", "y", "z", "w"][: self.nvars] if self.nvars <= 4 else [f"x{i}" for i in range(self.nvars)]
        marker = {} if self.order == INF else {names[0]: self.order}
        text = format_multivariate(self.coeffs, names)
        if self.order != INF:
            text += f" + O(deg {self.order})"
        return f"MPoly({text!r})"


def _nest(coeffs, order, names, shift=0):
    if len(names) == 1:
        return LaurentSeries({k[0]: v for k, v in coeffs.items()}, order - shift if order != INF else INF, names[0])
    groups = {}
    for k, v in coeffs.items():
        groups.setdefault(k[-1], {})[k[:-1]] = v
    rows = {}
    outer_order = order - shift if order != INF else INF
    for j, sub in groups.items():
        rows[j] = _nest(sub, order, names[:-1], shift + j)
    if order != INF:
        # rows that are zero to their precision must still be recorded
        for j in range(0, int(outer_order)):
            if j not in rows:
                rows[j] = _nest({}, order, names[:-1], shift + j)
    return LaurentSeries(rows, outer_order, names[-1])


# ---------------------------------------------------------------------------
# tagged bivariate series


class BiSeries:
    """Series in two named variables with an expansion convention.

    ``series`` is nested with ``vars[1]`` outermost.  For WW values ``window``
    is ``((lo1, hi1), (lo2, hi2))`` and only exponents inside it are
    meaningful.
    """

    __slots__ = ("convention", "vars", "series", "window")

    def __init__(self, series, convention="LP", vars=None, window=None):
        if convention not in CONVENTIONS:
            raise ConventionMismatch(f"unknown convention {convention!r}")
        if not isinstance(series, LaurentSeries):
            raise TypeError("BiSeries wraps a nested LaurentSeries")
        nv = nested_vars(series)
        if vars is None:
            if len(nv) != 2:
                raise ConventionMismatch("cannot infer two variable names")
            vars = (nv[1], nv[0])
        vars = tuple(vars)
        if series.var != vars[1]:
            raise ConventionMismatch(f"outer variable must be {vars[1]!r}")
        if convention in ("PP", "LP") and series.coeffs and min(series.coeffs) < 0:
            raise ConventionMismatch(f"{convention} needs nonnegative {vars[1]}-exponents")
        if convention == "PP":
            for row in series.coeffs.values():
                if isinstance(row, LaurentSeries) and row.coeffs and min(row.coeffs) < 0:
                    raise ConventionMismatch(f"PP needs nonnegative {vars[0]}-exponents")
        if convention == "WW" and window is None:
            raise ConventionMismatch("WW values need a window")
        self.convention = convention
        self.vars = vars
        self.series = series
        self.window = window

    @classmethod
    def from_dict(cls, coeffs, vars=("x", "z"), orders=None, convention="LP", window=None):
        """Build from ``{(e1, e2): c}``; ``orders`` maps a variable to its order."""
        orders = orders or {}
        o1 = orders.get(vars[0], INF)
        o2 = orders.get(vars[1], INF)
        rows = {}
        for (e1, e2), c in coeffs.items():
            rows.setdefault(e2, {})[e1] = c
        if o2 != INF:
            for j in range(min(rows, default=0), int(o2)):
                rows.setdefault(j, {})
        nested = {j: LaurentSeries(r, o1, vars[0]) for j, r in rows.items()}
        return cls(LaurentSeries(nested, o2, vars[1]), convention, vars, window)

    @classmethod
    def parse(cls, text, vars=("x", "z"), convention="LP"):
        coeffs, orders = parse_multivariate(text, vars)
        return cls.from_dict(coeffs, vars, orders, convention)

    @classmethod
    def from_mpoly(cls, p: MPoly, vars=("x", "y")):
        return cls(p.to_nested(vars), "PP", vars)

    def coefficient(self, e1, e2):
        """(known, value) of the coefficient of ``v1^e1 v2^e2``."""
        if self.window is not None:
            (a, b), (c, d) = self.window
            if not (a <= e1 <= b and c <= e2 <= d):
                return False, None
        return lookup(self.series, {self.vars[0]: e1, self.vars[1]: e2})

    def to_dict(self):
        out = {}
        for e2, row in self.series.coeffs.items():
            if isinstance(row, LaurentSeries):
                for e1, c in row.coeffs.items():
                    out[(e1, e2)] = c
            else:
                out[(0, e2)] = row
        return out

    def text(self):
        orders = {self.vars[1]: self.series.order}
        inner = [r.order for r in self.series.coeffs.values() if isinstance(r, LaurentSeries)]
        if inner and len(set(inner)) == 1:
            orders[self.vars[0]] = inner[0]
        return format_multivariate(self.to_dict(), self.vars, orders)

    def window_json(self):
        if self.window is None:
            return None
        return json.dumps({"var1": list(self.window[0]), "var2": list(self.window[1])})

    def __repr__(self):
        return f"BiSeries({self.convention}, {self.vars}, {self.text()!r})"

    def _wrap(self, series, convention=None):
        return BiSeries(series, convention or self.convention, self.vars, self.window)

    def __add__(self, other):
        return self._wrap(self.series + _unwrap(other))

    def __sub__(self, other):
        return self._wrap(self.series - _unwrap(other))

    def __mul__(self, other):
        return self._wrap(self.series * _unwrap(other))

    def __neg__(self):
        return self._wrap(-self.series)


def _unwrap(x):
    return x.series if isinstance(x, BiSeries) else x


def parse_window(text):
    """'a:b' -> (a, b)."""
    a, b = str(text).split(":")
    a, b = int(a), int(b)
    if a > b:
        raise ValueError(f"empty window {text!r}")
    return a, b


# ---------------------------------------------------------------------------
# iota expansion


def iota_expand(num, den, direction, precision):
    """Expand num/den as a series Laurent in ``direction[0]``, power series in ``direction[1]``.

    ``num`` and ``den`` are PP BiSeries (or nested series) in the two
    variables.  The result is known modulo ``direction[1]**precision``.
    """
    first, second = direction
    n = _reorient(_unwrap(num), first, second)
    d = _reorient(_unwrap(den), first, second)
    if d.is_exact_zero():
        raise ZeroDenominator("denominator is identically zero")
    if not d:
        raise ZeroDenominator(f"denominator vanishes to the requested precision")
    inv = d.inverse(order=precision)
    out = (n * inv).truncate(precision)
    return BiSeries(out, "LP" if out.low >= 0 else "WW", (first, second),
                    None if out.low >= 0 else ((-INF, INF), (out.low, precision - 1)))


def _reorient(s, first, second):
    """Return s nested with ``second`` outermost (transposing a PP value if needed)."""
    if not isinstance(s, LaurentSeries):
        return LaurentSeries.constant(LaurentSeries.constant(s, first), second)
    nv = nested_vars(s)
    if nv and nv[0] == second:
        return s
    if nv and nv[0] == first:
        return swap_nesting(s, second)
    return LaurentSeries.constant(s, second)


def swap_nesting(s, new_outer):
    """Swap the two outermost variables of a nested series.

    A coefficient (e, f) of ``s`` is known iff e < s.order and f is below the
    order of row e.  The transposed value keeps the rows f below the smallest
    row order, each known up to ``s.order``.
    """
    table = {}
    inner_var = s.var
    row_orders = []
    for e, row in s.coeffs.items():
        if not isinstance(row, LaurentSeries):
            row = LaurentSeries.constant(row, new_outer)
        row_orders.append(row.order)
        for f, c in row.coeffs.items():
            table.setdefault(f, {})[e] = c
    out_order = min(row_orders, default=INF)
    rows = {f: LaurentSeries(r, s.order, inner_var) for f, r in table.items() if f < out_order}
    if out_order != INF:
        for f in range(min(table, default=0), int(out_order)):
            rows.setdefault(f, LaurentSeries({}, s.order, inner_var))
    return LaurentSeries(rows, out_order, new_outer)


# ---------------------------------------------------------------------------
# substitutions


def substitute_second(a, g: LaurentSeries):
    """psi(x, z) -> psi(x, g(z)) for an LP value and g with g(0) = 0."""
    if isinstance(a, BiSeries):
        if a.convention not in ("LP", "PP"):
            raise ConventionMismatch("substitute_second needs an LP (or PP) series")
        s = a.series
        vars = a.vars
    else:
        s = a
        vars = (nested_vars(a)[1] if len(nested_vars(a)) > 1 else "x", a.var)
    if s.coeffs and min(s.coeffs) < 0:
        raise ConventionMismatch("substitute_second needs nonnegative exponents in the second variable")
    out = compose(s, g.rename(s.var))
    return BiSeries(out, "LP", vars) if isinstance(a, BiSeries) else out


def _outer_valuation(delta):
    v, _ = delta.leading()
    if v < 1:
        raise PrecisionExhausted("substitution shift must have positive valuation")
    return v


def _outer_low(a):
    return a.low if isinstance(a, LaurentSeries) else 0


def _map_inner(a, target, fn):
    """Apply fn to the univariate series in variable ``target`` inside ``a``."""
    if not isinstance(a, LaurentSeries):
        return a
    if a.var == target:
        return fn(a)
    return a.map(lambda c: _map_inner(c, target, fn))


def _rename_inner(a, target, new):
    return _map_inner(a, target, lambda s: s.rename(new))


def taylor_substitute(a, target, new_var, delta, order=None):
    """Substitute ``target = new_var + delta`` by Taylor expansion.

    ``delta`` is nested with an outer variable ``o`` (inner ``new_var``) and
    has positive ``o``-valuation, so only finitely many Taylor terms reach a
    given power of ``o``.  ``a`` is either univariate in ``target`` or nested
    with ``o`` outermost and ``target`` inside.  The result has ``o``
    outermost.  ``order`` bounds the ``o``-precision; it is required when all
    inputs are exact and the expansion does not terminate.
    """
    v = _outer_valuation(delta)
    same_outer = a.var == delta.var
    if not same_outer and a.var != target:
        raise ConventionMismatch("taylor_substitute needs a univariate series or a shared outer variable")
    a_low = a.low if same_outer else 0
    cap = INF if order is None else order
    if same_outer:
        cap = min(cap, a.order)
    term = a
    total = None
    power = None
    j = 0
    fact = 1
    while True:
        piece = _rename_inner(term, target, new_var)
        if j:
            piece = piece * power if same_outer else power * piece
            piece = piece * Fraction(1, fact)
        elif not same_outer:
            piece = LaurentSeries.constant(piece, delta.var)
        if cap != INF:
            piece = piece.truncate(cap)
        total = piece if total is None else total + piece
        bound = min(cap, total.order)
        j += 1
        fact *= j
        term = _map_inner(term, target, lambda r: r.derivative())
        if bound != INF and a_low + j * v >= bound:
            break
        if bound == INF and _is_exact_zero_deep(term):
            break
        if bound == INF and j > 64:
            raise PrecisionExhausted("exact Taylor substitution does not terminate; pass an order")
        power = delta if power is None else power * delta
        if bound != INF:
            power = power.truncate(bound - a_low)
    return total


def _is_exact_zero_deep(a):
    return exact_zero(a) if not isinstance(a, LaurentSeries) else a.is_exact_zero() or (
        a.order == INF and all(_is_exact_zero_deep(c) for c in a.coeffs.values()))


def diagonal(a, floor=None):
    """Collapse x1 = x2 in a nested series (outer x2, inner x1): c -> sum_{a+b=c} A[a,b].

    ``floor`` is a lower bound for the inner exponents of every row,
    including rows beyond the outer precision.  It is inferred when the
    series is exact in both variables.
    """
    rows = {e: r for e, r in a.coeffs.items()}
    for e, r in rows.items():
        if not isinstance(r, LaurentSeries):
            raise ConventionMismatch("diagonal needs a two-variable series")
    inner_var = next((r.var for r in rows.values()), None)
    exact = a.order == INF and all(r.order == INF for r in rows.values())
    if floor is None:
        if not exact:
            raise UnboundedPrincipalPart("no lower bound on the substituted variable is available")
        floor = min((r.low for r in rows.values() if r.coeffs), default=0)
    for e, r in rows.items():
        if r.coeffs and min(r.coeffs) < floor:
            low = min(r.coeffs)
            raise UnboundedPrincipalPart(
                f"row {a.var}^{e} has a term {inner_var}^{low} below the floor {floor}")
    order = a.order + floor if a.order != INF else INF
    for e, r in rows.items():
        if r.order != INF:
            order = min(order, max(e + floor, r.order + e))
    out = {}
    for e, r in rows.items():
        for f, c in r.coeffs.items():
            if e + f < order:
                out[e + f] = out[e + f] + c if (e + f) in out else c
    return LaurentSeries(out, order, a.var)


def diagonal_substitute(a, target, other, delta, floor=None, order=None):
    """Substitute ``target = other + delta`` into ``a`` (outer ``other``, inner ``target``).

    ``delta`` is nested with a new outer variable and inner ``other`` and has
    positive outer valuation; the result has that new variable outermost.
    This realizes expansions such as A(x1, x2)|_{x1 = x2 e^{x0}} in
    ((x2))((x0)); it needs the lower bound ``floor`` on ``target``-exponents
    (see :func:`diagonal`).
    """
    if a.var != other:
        raise ConventionMismatch(f"outer variable must be {other!r}")
    v = _outer_valuation(delta)
    cap = INF if order is None else order
    term = a
    total = None
    power = None
    j = 0
    fact = 1
    while True:
        if j:
            term = term.map(lambda r: r.derivative())
            fact *= j
            power = delta if power is None else power * delta
            if cap != INF:
                power = power.truncate(cap)
        d = diagonal(term, None if floor is None else floor - j)
        if j:
            d = d * Fraction(1, fact)
            piece = power * d
        else:
            piece = LaurentSeries.constant(d, delta.var)
        if cap != INF:
            piece = piece.truncate(cap)
        total = piece if total is None else total + piece
        j += 1
        bound = min(cap, total.order)
        if bound != INF and j * v >= bound:
            break
        if bound == INF and _is_exact_zero_deep(term.map(lambda r: r.derivative())):
            break
        if bound == INF and j > 64:
            raise PrecisionExhausted("exact diagonal substitution does not terminate; pass an order")
    return total


def substitute_var(a, target, s, kind="taylor", floor=None, order=None):
    """Replace ``target`` by the two-variable series ``s``.

    ``s`` must satisfy s(y, 0) = y where y is its inner variable; the shift
    ``s - y`` carries the positive-valuation outer variable.  ``kind`` selects
    the expansion: ``"taylor"`` keeps a's outer variable (x1 = F(x0, x2) in
    ((x0))((x2))), ``"diagonal"`` identifies target with s's inner variable
    (x1 = phi(x2, x0) in ((x2))((x0))).
    """
    a_s = _unwrap(a)
    s_s = _unwrap(s)
    inner = nested_vars(s_s)[1]
    delta = shift_part(s_s)
    if kind == "taylor":
        return taylor_substitute(a_s, target, inner, delta, order)
    if kind == "diagonal":
        return diagonal_substitute(a_s, target, inner, delta, floor, order)
    raise ValueError(f"unknown substitution kind {kind!r}")


def shift_part(s):
    """s(y, w) - y for a nested series with s(y, 0) = y (outer w, inner y)."""
    row0 = s.coeffs.get(0)
    inner = nested_vars(s)[1]
    y = LaurentSeries.monomial(1, var=inner)
    if row0 is None or not row0.agrees(y) or (row0.order != INF and row0.order < 2):
        raise ConventionMismatch("substitution series must satisfy s(y, 0) = y")
    rest = {e: c for e, c in s.coeffs.items() if e != 0}
    return LaurentSeries(rest, s.order, s.var)


# ---------------------------------------------------------------------------
# checks on windows


def compare_windows(lhs, rhs, box, names=None):
    """Compare two nested series on a box of named exponents (see report.compare_box)."""
    from .report import compare_box

    return compare_box(lhs, rhs, box, names)


def double_substitution_roundtrip(a, group, window=6, order=None):
    """Check (A|_{x1=F(x0,x2)})|_{x0=f^{-1}(f(x1)-f(x2))} = A on a window.

    ``a`` is a nested series with outer ``x2`` and inner ``x1``.
    """
    from .report import CheckReport

    N = order or (2 * window + 4)
    A = _unwrap(a)
    if not isinstance(A, LaurentSeries) or nested_vars(A)[0] != "x2":
        A = LaurentSeries.constant(A if isinstance(A, LaurentSeries) else LaurentSeries.constant(A, "x1"), "x2")
    Fn = group.nested(("x0", "x2"), N)
    step1 = taylor_substitute(A, "x1", "x0", shift_part(Fn), order=N + A.low)
    G = group.difference_series(N).to_nested(("x1", "x2"))
    back = taylor_substitute(step1, "x0", "x1", shift_part(G), order=N + A.low)
    box = {"x1": (-window, window), "x2": (-window, window)}
    compared, bad = compare_windows(back, A, box, ["x2", "x1"])
    inputs = {"a": _describe(A), "group": group.name}
    if bad:
        return CheckReport.failed("double-substitution", inputs, box, bad[0], bad[1], bad[2])
    if compared == 0:
        return CheckReport.insufficient("double-substitution", inputs, box)
    return CheckReport.passed("double-substitution", inputs, box, compared=compared)


def _describe(s):
    try:
        from .literals import flatten

        table, names = flatten(s)
        return format_multivariate(table, names[::-1]) if table else "0"
    except Exception:  # pragma: no cover - description only
        return repr(s)


def compose_nested(h: LaurentSeries, psi: LaurentSeries):
    """h(psi) for a univariate power series h and nested psi = psi0(y) + delta(y, o).

    ``psi`` has outer variable o, row 0 a series in y of positive valuation,
    and the remaining rows form delta.  Uses the Taylor expansion
    sum_j h^(j)(psi0) delta^j / j!, so every precision is derived.
    """
    row0 = psi.coeffs.get(0)
    if not isinstance(row0, LaurentSeries):
        raise ConventionMismatch("compose_nested needs a nested series with a series-valued row 0")
    delta = LaurentSeries({e: c for e, c in psi.coeffs.items() if e != 0}, psi.order, psi.var)
    v = _outer_valuation(delta) if delta.coeffs else 1
    total = None
    hj = h.rename(row0.var)
    power = None
    fact = 1
    j = 0
    while True:
        inner = compose(hj, row0)
        piece = LaurentSeries.constant(inner, psi.var) if j == 0 else (power * inner) * Fraction(1, fact)
        total = piece if total is None else total + piece
        total = total.truncate(psi.order)
        j += 1
        fact *= j
        hj = hj.derivative()
        if total.order != INF and j * v >= total.order:
            break
        if not delta.coeffs or hj.is_exact_zero():
            break
        if total.order == INF and j > 64:
            raise PrecisionExhausted("exact nested composition does not terminate")
        power = delta if power is None else (power * delta).truncate(total.order)
    return total
