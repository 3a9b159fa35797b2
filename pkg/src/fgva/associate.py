"""Associates phi(x, z) of a formal group and their classification by p(x).

An associate is stored as a nested series with ``z`` outermost and Laurent
series in ``x`` as coefficients, i.e. an element of Q((x))[[z]] known
modulo z^N.
"""

from __future__ import annotations

from fractions import Fraction

from .bivar import BiSeries, MPoly, compose_nested, substitute_second, taylor_substitute
from .errors import DomainViolation, GroupMismatch, PrecisionExhausted
from .formal_group import FormalGroupLaw, canonical_group, fg_builtin, fg_conjugate, fg_log
from .literals import format_multivariate, flatten, parse_multivariate
from .report import CheckReport, compare_support
from .series import INF, LaurentSeries, compose, is_gseries, reversion, var_series


class Associate:
    """A validated associate of ``group`` known modulo z^z_order.

    ``p`` is the classifying series when the associate was built from one.
    """

    def __init__(self, phi: LaurentSeries, group: FormalGroupLaw, p=None, check=True):
        if phi.var != "z":
            raise DomainViolation("an associate is a series in z over Laurent series in x")
        self.phi = phi
        self.group = group
        self.p = p
        self.z_order = phi.order
        if check:
            report = assoc_check(phi, group)
            if not report.ok:
                raise DomainViolation(f"not an associate of {group.name}: {report.text()}")

    def __repr__(self):
        return f"Associate({self.text()!r} over {self.group.name})"

    @property
    def precision(self):
        return {"z_order": self.z_order, "x_window": self.x_window()}

    def x_window(self):
        lows, highs = [], []
        for row in self.phi.coeffs.values():
            if row.coeffs:
                lows.append(min(row.coeffs))
                highs.append(max(row.coeffs))
        return (min(lows, default=0), max(highs, default=0))

    def row(self, k) -> LaurentSeries:
        """Coefficient of z^k, a Laurent series in x."""
        if k >= self.z_order:
            raise PrecisionExhausted(f"z^{k} is beyond the associate's precision")
        return self.phi.coeffs.get(k, LaurentSeries.zero(var="x"))

    def bivariate(self) -> BiSeries:
        return BiSeries(self.phi, "LP", ("x", "z"))

    def table(self):
        out = {}
        for e2, row in self.phi.coeffs.items():
            for e1, c in row.coeffs.items():
                out[(e1, e2)] = c
        return out

    def text(self):
        return format_multivariate(self.table(), ("x", "z"), {"z": self.z_order})

    def __eq__(self, other):
        return isinstance(other, Associate) and self.phi == other.phi and self.group == other.group

    __hash__ = None


def phi_from_literal(text, z_order=None):
    """Nested series for a literal in x and z (exact in x, truncated in z)."""
    coeffs, orders = parse_multivariate(text, ("x", "z"))
    N = orders["z"] if z_order is None else min(orders["z"], z_order)
    if N == INF:
        raise PrecisionExhausted("associate literals need O(z^N) or an explicit z-order")
    rows = {}
    for (e1, e2), c in coeffs.items():
        if e2 < N:
            rows.setdefault(e2, {})[e1] = c
    return LaurentSeries({k: LaurentSeries(r, orders["x"], "x") for k, r in rows.items()}, N, "z")


def _derivation_powers(p: LaurentSeries, count):
    """[x, (p d/dx) x, (p d/dx)^2 x, ...]"""
    out = [var_series("x")]
    for _ in range(1, count):
        out.append(p * out[-1].derivative())
    return out


def assoc_from_p(F: FormalGroupLaw, p: LaurentSeries, z_order: int, x_window=None, validate=True) -> Associate:
    """psi_p(x, z) = exp(f(z) p(x) d/dx) x modulo z^z_order, f = log F.

    ``x_window = (a, b)`` asks that every z-row be known at least through
    x^b; a p known only to finite precision shrinks the window with each
    derivation step and may fail this requirement.  ``validate=False``
    skips the associate check for callers that run it themselves.
    """
    p = p.rename("x") if p.var != "x" else p
    f = fg_log(F, z_order).rename("z")
    powers = _derivation_powers(p, z_order)
    phi = LaurentSeries.zero(z_order, "z")
    fk = LaurentSeries.constant(1, "z")
    fact = 1
    for k in range(z_order):
        if k:
            fk = (fk * f).truncate(z_order)
            fact *= k
        phi = phi + (fk * Fraction(1, fact)) * powers[k]
    if x_window is not None:
        hi = x_window[1]
        for k, row in phi.coeffs.items():
            if row.order <= hi:
                raise PrecisionExhausted(
                    f"z^{k} row is known only below x^{row.order}, short of the window end x^{hi}")
    return Associate(phi, F, p, check=validate)


def assoc_check(phi, F: FormalGroupLaw, z_order=None) -> CheckReport:
    """Check phi(x, 0) = x and phi(phi(x, y), z) = phi(x, F(y, z)).

    The composite axiom is compared on every (x, y, z) exponent whose
    coefficient is determined on both sides: a y^b z^c term needs
    b + c below the z-order of phi.
    """
    if isinstance(phi, Associate):
        phi = phi.phi
    if isinstance(phi, BiSeries):
        phi = phi.series
    if isinstance(phi, str):
        phi = phi_from_literal(phi, z_order)
    N = phi.order if z_order is None else min(phi.order, z_order)
    phi = phi.truncate(N)
    inputs = {"phi": _text(phi), "group": F.name}
    window = {"z_order": N}
    # unit axiom
    row0 = phi.coeffs.get(0, LaurentSeries.zero(var="x"))
    x = var_series("x")
    diff = row0 - x
    for e, c in diff.items():
        if c:
            return CheckReport.failed("assoc-check", inputs, window, (e, 0), row0.coefficient(e),
                                      x.coefficient(e), axiom="unit")
    if N < 2:
        return CheckReport.insufficient("assoc-check", inputs, window, axiom="composite")
    delta = LaurentSeries({e: c for e, c in phi.coeffs.items() if e}, N, "y")
    lhs_rows = {}
    for c, row in phi.coeffs.items():
        if delta.coeffs:
            # only y^b z^c with b + c < N is compared
            lhs_rows[c] = taylor_substitute(row, "x", "x", delta, order=N - c)
        else:
            # phi = x in the window, so phi(phi(x, y), z) needs no expansion
            lhs_rows[c] = LaurentSeries({0: row}, N, "y")
    lhs = LaurentSeries(lhs_rows, N, "z")
    Fyz = F.nested(("y", "z"), None if F.order == INF else F.order)
    rhs = None
    power = LaurentSeries.constant(1, "z")
    for k in range(N):
        if k:
            power = (power * Fyz).truncate(N)
        row = phi.coeffs.get(k)
        if row is None:
            continue
        term = power * row
        rhs = term if rhs is None else rhs + term
    rhs = rhs.truncate(N)
    names = ("x", "y", "z")
    known = lambda e: e["y"] + e["z"] < N
    compared, bad = compare_support(lhs, rhs, names, known,
                                    key=lambda k: (k[1] + k[2], k[2], k[1], k[0]))
    if bad:
        return CheckReport.failed("assoc-check", inputs, window, bad[0], bad[1], bad[2], axiom="composite")
    return CheckReport.passed("assoc-check", inputs, window, compared=compared)


def _text(phi):
    try:
        table, _ = flatten(phi, ("x", "z"))
        return format_multivariate(table, ("x", "z"), {"z": phi.order})
    except Exception:
        return repr(phi)


def assoc_extract_p(a: Associate) -> LaurentSeries:
    """p(x) = d phi/dz at z = 0 (f'(0) = 1 makes this the classifying series)."""
    if a.z_order < 2:
        raise PrecisionExhausted("extracting p needs the z^1 row")
    return a.phi.coeffs.get(1, LaurentSeries.zero(var="x"))


def _conjugate_phi(phi, g, order):
    """g^{-1}(phi(g(x), g(z))) modulo z^order."""
    ginv = reversion(g.truncate(order + 1), order + 1) if g.order != INF else reversion(g, order + 1)
    s = substitute_second(phi, g.rename("z").truncate(max(order, 2)))
    rows = {k: compose(row, g.rename("x")) for k, row in s.coeffs.items()}
    inner = LaurentSeries(rows, s.order, "z")
    return compose_nested(ginv, inner)


def assoc_transform(a: Associate, g=None, kind="conjugate", group=None, order=None) -> Associate:
    """Transform an associate.

    * ``conjugate``: g^{-1}(phi(g(x), g(z))), an associate of F_g.
    * ``retime``: phi(x, g(z)), an associate of F_g.
    * ``bar``: f^{-1}(phi(f(x), f(z))) with f the logarithm of ``group``;
      the input must be an associate of the additive law.
    """
    N = order or a.z_order
    if kind == "bar":
        if group is None:
            raise ValueError("bar needs the target group")
        if a.group.poly != fg_builtin("additive").poly:
            raise GroupMismatch("bar applies to associates of the additive law")
        f = fg_log(group, N + 1) if group.order == INF else fg_log(group, min(group.order, N + 1))
        phi = _conjugate_phi(a.phi.truncate(N), f, N)
        return Associate(phi.truncate(N), group)
    if g is None or not is_gseries(g):
        raise DomainViolation("transforms need g with g(0) = 0 and g'(0) = 1")
    if g.order != INF and g.order < N + 1:
        N = g.order - 1
    target = fg_conjugate(a.group, g, N + 1 if g.order == INF or g.order > N else g.order)
    if kind == "conjugate":
        phi = _conjugate_phi(a.phi.truncate(N), g, N)
    elif kind == "retime":
        phi = substitute_second(a.phi.truncate(N), g.rename("z").truncate(N))
    else:
        raise ValueError(f"unknown transform {kind!r}")
    target = canonical_group(target)
    return Associate(phi.truncate(N), target)


def first_mismatch(a, b):
    """First (x-exp, z-exp, a-coeff, b-coeff) where two associates differ, or None."""
    pa = a.phi if isinstance(a, Associate) else a
    pb = b.phi if isinstance(b, Associate) else b
    N = min(pa.order, pb.order)
    _, bad = compare_support(pa.truncate(N), pb.truncate(N), ("x", "z"),
                             key=lambda k: (k[0] + k[1], k[1], k[0]))
    return bad


def nonvanishing_probe(q, a, window=6) -> CheckReport:
    """Look for a nonzero coefficient of q(phi(x, z), x) with z-exponent below ``window``.

    ``q`` is a polynomial in (x1, x2): an MPoly, a literal or a coefficient
    table.  Nonvanishing can be witnessed but never refuted, so an all-zero
    window gives an insufficient-precision verdict.
    """
    phi = a.phi if isinstance(a, Associate) else a
    if isinstance(q, str):
        coeffs, _ = parse_multivariate(q, ("x1", "x2"))
    elif isinstance(q, MPoly):
        coeffs = q.coeffs
    else:
        coeffs = dict(q)
    inputs = {"q": format_multivariate(coeffs, ("x1", "x2")), "phi": _text(phi)}
    N = min(phi.order, window)
    win = {"z_order": N}
    row0 = phi.coeffs.get(0)
    if row0 is not None and phi.truncate(N).coeffs.keys() == {0}:
        return CheckReport.insufficient("nonvanishing-probe", inputs, win, note="phi = x in the window")
    x = LaurentSeries.constant(var_series("x"), "z")
    total = LaurentSeries.zero(N, "z")
    cache = {0: LaurentSeries.constant(LaurentSeries.constant(1, "x"), "z")}
    ph = phi.truncate(N)
    for (i, j), c in sorted(coeffs.items()):
        if i not in cache:
            p = cache[max(cache)]
            for m in range(max(cache) + 1, i + 1):
                p = (p * ph).truncate(N)
                cache[m] = p
        term = cache[i] * LaurentSeries.monomial(j, c, "x")
        total = total + term
    total = total.truncate(N)
    for k in sorted(total.coeffs):
        row = total.coeffs[k]
        nz = [e for e, v in row.items() if v]
        if nz:
            e = nz[0]
            return CheckReport.passed("nonvanishing-probe", inputs, win,
                                      witness_exponents=(e, k), witness_value=row.coefficient(e),
                                      witness_row=str(row))
    return CheckReport.insufficient("nonvanishing-probe", inputs, win, note="inconclusive-window")
