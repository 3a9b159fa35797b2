"""Windowed checks of the vertex-algebra axioms at exact precision.

Every check compares two nested vector-valued series coefficient by
coefficient on a box of exponents, skipping coefficients that either side
does not determine.  Nothing is approximate: a single differing rational
is a failure with a witness.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

from .bivar import diagonal_substitute, shift_part, taylor_substitute
from .errors import OverflowBeyondCap, PrecisionExhausted
from .formal_group import fg_builtin
from .linear import Vector
from .report import FAIL, PASS, CheckReport, compare_box, verdict_from_compare
from .series import INF, LaurentSeries, compose, lookup, var_series
from .vertex import VertexStructure, apply_field, apply_linear, apply_linear_series, group_log, vacuum_check

DEFAULT_WINDOW = (-6, 6)
DEFAULT_MAX = 8


def box_of(window, names):
    """Box dict from a (lo, hi) pair, a list of pairs, or a dict."""
    if isinstance(window, dict):
        return {n: tuple(window[n]) for n in names}
    if window and isinstance(window[0], (tuple, list)):
        return {n: tuple(w) for n, w in zip(names, window)}
    return {n: tuple(window) for n in names}


def difference_power(k, outer, inner, g=None, order=INF):
    """(g(x1) - g(x2))^k as a nested series with ``outer`` outermost.

    ``inner``/``outer`` name x1/x2 or x2/x1; the difference is always
    g(x1) - g(x2) with x1 the variable named first in ("x1", "x2").
    """
    g = var_series() if g is None else g
    gi = g.rename(inner).truncate(order)
    go = g.rename(outer).truncate(order)
    rows = {0: gi}
    for e, c in go.coeffs.items():
        rows[e] = rows.get(e, LaurentSeries.zero(var=inner)) - c
    d = LaurentSeries(rows, go.order, outer)
    if inner == "x2":
        d = -d
    out = LaurentSeries.constant(LaurentSeries.constant(1, inner), outer)
    for _ in range(k):
        out = out * d
    return out


def _products(a, b, w):
    """a(x1)b(x2)w nested (x2 outer, x1 inner) and b(x2)a(x1)w nested (x1 outer, x2 inner)."""
    a12 = apply_field(a, b(w).rename("x2"), "x1")
    a21 = apply_field(b, a(w).rename("x1"), "x2")
    return a12, a21


def _right_side(V, u, v, w):
    """Y(Y(u, x0)v, x2)w nested with x0 outermost."""
    return apply_field(V.state_field(w), V.Y(u, v, "x0"), "x2")


def _panel(V, panel, size=4):
    if panel is not None:
        return list(panel)
    return list(V.labels[:size])


def _safe(fn, *args):
    try:
        return fn(*args)
    except OverflowBeyondCap:
        return None


# ---------------------------------------------------------------------------
# weak associativity


def assoc_sides(V: VertexStructure, u, v, w, x2_order):
    """(LHS, RHS) of weak F-associativity before the F(x0, x2)^l factor.

    LHS = Y(u, F(x0, x2))Y(v, x2)w in ((x0))((x2)); RHS = Y(Y(u, x0)v, x2)w.
    """
    F = V.group
    a12 = apply_field(V.field(u), V.Y(v, w, "x2"), "x1")
    Fn = F.nested(("x0", "x2"))
    lhs = taylor_substitute(a12, "x1", "x0", shift_part(Fn), order=x2_order)
    rhs = _right_side(V, u, v, w)
    return lhs, rhs


def check_weak_assoc(V: VertexStructure, u, v, w, l_max=DEFAULT_MAX, window=DEFAULT_WINDOW) -> CheckReport:
    """Least l <= l_max with F(x0,x2)^l Y(u,F(x0,x2))Y(v,x2)w = F(x0,x2)^l Y(Y(u,x0)v,x2)w on the box."""
    box = box_of(window, ("x0", "x2"))
    inputs = {"u": u, "v": v, "w": w, "group": V.group.name}
    try:
        lhs, rhs = assoc_sides(V, u, v, w, box["x2"][1] + 1)
    except OverflowBeyondCap as e:
        return CheckReport.insufficient("weak-assoc", inputs, box, note=str(e))
    F = V.group
    left_mult = LaurentSeries.constant(LaurentSeries.constant(1, "x0"), "x2")
    right_mult = LaurentSeries.constant(LaurentSeries.constant(1, "x2"), "x0")
    Fl, Fr = F.nested(("x0", "x2")), F.nested(("x2", "x0"))
    last = None
    for l in range(l_max + 1):
        if l:
            left_mult = left_mult * Fl
            right_mult = right_mult * Fr
        compared, bad = compare_box(left_mult * lhs, right_mult * rhs, box, ("x0", "x2"))
        if compared == 0:
            return CheckReport.insufficient("weak-assoc", inputs, box, compared=0)
        if bad is None:
            return CheckReport.passed("weak-assoc", inputs, box, l, compared=compared)
        last = bad
    return CheckReport.failed("weak-assoc", inputs, box, last[0], last[1], last[2],
                              note=f"no l <= {l_max} works on the box")


# ---------------------------------------------------------------------------
# weak commutativity


def commutator_sides(a, b, w, k):
    a12, a21 = _products(a, b, w)
    return difference_power(k, "x2", "x1") * a12, difference_power(k, "x1", "x2") * a21


def check_weak_comm(V: VertexStructure, u, v, k_max=DEFAULT_MAX, window=DEFAULT_WINDOW, panel=None) -> CheckReport:
    """Least k <= k_max with (x1-x2)^k Y(u,x1)Y(v,x2)w = (x1-x2)^k Y(v,x2)Y(u,x1)w on a panel of w."""
    box = box_of(window, ("x1", "x2"))
    ws = _panel(V, panel)
    inputs = {"u": u, "v": v, "panel": ws, "group": V.group.name}
    return _comm_search("weak-comm", V.field(u), V.field(v), ws, k_max, box, inputs)


def _comm_search(name, a, b, ws, k_max, box, inputs, g=None, order=INF):
    obstructions = []
    total = 0
    for k in range(k_max + 1):
        bad_k = None
        for w in ws:
            try:
                a12, a21 = _products(a, b, w)
            except OverflowBeyondCap:
                continue
            l = difference_power(k, "x2", "x1", g, order) * a12
            r = difference_power(k, "x1", "x2", g, order) * a21
            compared, bad = compare_box(l, r, box, ("x1", "x2"))
            total += compared
            if bad is not None:
                bad_k = bad
                break
        if total == 0:
            return CheckReport.insufficient(name, inputs, box, compared=0)
        if bad_k is None:
            return CheckReport.passed(name, inputs, box, k, compared=total)
        obstructions.append((k, bad_k[0]))
    first = _first_obstruction(a, b, ws, box, g, order)
    return CheckReport.failed(name, inputs, box, first[0], first[1], first[2],
                              note=f"every k <= {k_max} leaves a nonzero difference",
                              obstructions=obstructions)


def _first_obstruction(a, b, ws, box, g, order):
    for w in ws:
        try:
            a12, a21 = _products(a, b, w)
        except OverflowBeyondCap:
            continue
        _, bad = compare_box(a12, a21, box, ("x1", "x2"))
        if bad is not None:
            return bad
    raise AssertionError("no obstruction at k = 0")


# ---------------------------------------------------------------------------
# the alternative form of F-associativity


def principal_floor(a, labels):
    """Least exponent of a(x)b over basis labels b: a bound for the x1-principal part."""
    lows = []
    for b in labels:
        try:
            s = a(b)
        except OverflowBeyondCap:
            continue
        if s.coeffs:
            lows.append(min(s.coeffs))
    return min(lows, default=0)


def pp_violation(P, floor, box):
    """First known coefficient of P (outer x2, inner x1) with an x1-exponent below ``floor``."""
    lo2, hi2 = box["x2"]
    for e2 in sorted(P.coeffs):
        if e2 < lo2 or e2 > hi2:
            continue
        row = P.coeffs[e2]
        for e1, c in row.items():
            if e1 < floor and c:
                return (e1, e2), c
    return None


def check_F_assoc_alt(V: VertexStructure, u, v, k_max=DEFAULT_MAX, window=DEFAULT_WINDOW, panel=None,
                      cross_check=True) -> CheckReport:
    """Find k with (x1-x2)^k Y(u,x1)Y(v,x2) PP-supported, then check
    ((x1-x2)^k Y(u,x1)Y(v,x2)w)|_{x1=F(x2,x0)} = (F(x2,x0)-x2)^k Y(Y(u,x0)v,x2)w.
    """
    box = box_of(window, ("x0", "x2"))
    ws = _panel(V, panel)
    inputs = {"u": u, "v": v, "panel": ws, "group": V.group.name}
    F = V.group
    delta = shift_part(F.nested(("x2", "x0")))
    floor = principal_floor(V.field(u), V.labels)
    pp_box = {"x2": box["x2"]}
    last = None
    total = 0
    chosen = None
    for k in range(k_max + 1):
        bad_k = None
        for w in ws:
            try:
                a12 = apply_field(V.field(u), V.Y(v, w, "x2"), "x1")
                rhs = _right_side(V, u, v, w)
            except OverflowBeyondCap:
                continue
            P = difference_power(k, "x2", "x1") * a12
            viol = pp_violation(P, floor, pp_box)
            if viol is not None:
                bad_k = (viol[0] + (None,), viol[1], Vector())
                break
            lhs = diagonal_substitute(P, "x1", "x2", delta, floor=floor, order=box["x0"][1] + 1)
            mult = LaurentSeries.constant(LaurentSeries.constant(1, "x2"), "x0")
            for _ in range(k):
                mult = mult * delta
            compared, bad = compare_box(lhs, mult * rhs, box, ("x0", "x2"))
            total += compared
            if bad is not None:
                bad_k = bad
                break
        if bad_k is None and total:
            chosen = k
            break
        last = bad_k
    if chosen is None:
        if total == 0 and last is None:
            return CheckReport.insufficient("f-assoc-alt", inputs, box, compared=0)
        exps = tuple(e for e in last[0] if e is not None)
        return CheckReport.failed("f-assoc-alt", inputs, box, exps, last[1], last[2],
                                  note=f"no k <= {k_max} works")
    details = {"compared": total}
    if cross_check:
        verdicts = []
        for w in ws:
            r = check_weak_assoc(V, u, v, w, window=window)
            if r.verdict != "insufficient-precision":
                verdicts.append(r.verdict)
        details["weak_assoc_agrees"] = all(vd == PASS for vd in verdicts)
    return CheckReport.passed("f-assoc-alt", inputs, box, chosen, **details)


# ---------------------------------------------------------------------------
# Jacobi F-identity


def _sign(m):
    return -1 if m % 2 else 1


def binomial(n, j):
    out = Fraction(1)
    for i in range(j):
        out = out * (n - i) / (i + 1)
    return out


class _FPowers:
    """Coefficients of f(x)^m for integer m, with their precision."""

    def __init__(self, f):
        self.f = f
        self.exact_monomial = f.order == INF and f.coeffs == {1: 1}
        self.unit = None if self.exact_monomial else f.shift(-1)
        self.cache = {}

    def power(self, m):
        s = self.cache.get(m)
        if s is None:
            if self.exact_monomial:
                s = LaurentSeries.monomial(m)
            else:
                N = self.unit.order
                base = self.unit if m >= 0 else self.unit.inverse(order=N)
                s = base.pow(abs(m), N).shift(m)
            self.cache[m] = s
        return s

    def coef(self, m, e):
        """(known, value) of [x^e] f^m."""
        s = self.power(m)
        if e >= s.order:
            return False, None
        return True, s.coefficient(e)


def _table(series, names, box_p, box_q, lo_p, lo_q):
    """Lookup table of a nested vector series over the exponent ranges actually used."""
    out = {}
    for ap in range(lo_p, box_p[1] + 1):
        for aq in range(lo_q, box_q[1] + 1):
            out[(ap, aq)] = lookup(series, {names[0]: ap, names[1]: aq})
    return out


def _jacobi_term(fp, X, names, lo, box, s_name, kind):
    """Coefficient table of one Jacobi term on the box.

    ``X`` is the operator product, a nested series in the two variables
    ``names = (p, q)``; ``lo`` their lower exponent bounds; ``s_name`` the
    variable carrying f(s)^{-n-1}.  ``kind`` selects the binomial expansion:
    "12" for f(p)^{n-j}(-f(q))^j, "21" for f(p)^j(-f(q))^{n-j},
    "20" for f(p)^j f(q)^{n-j}.  Unknown coefficients are recorded as None.
    """
    p, q = names
    bp, bq = box[p], box[q]
    spread_p = bp[1] - lo[0]
    spread_q = bq[1] - lo[1]
    table = _table(X, names, bp, bq, lo[0], lo[1])
    n_lo = -box[s_name][1] - 1
    n_hi = spread_p + spread_q
    M = {}
    for n in range(n_lo, n_hi + 1):
        K = {}
        jmax = spread_q if kind == "12" else spread_p
        for j in range(0, max(jmax, -1) + 1):
            if kind == "12":
                ep, eq, c = n - j, j, binomial(n, j) * _sign(j)
            elif kind == "21":
                ep, eq, c = j, n - j, binomial(n, j) * _sign(n - j)
            else:
                ep, eq, c = j, n - j, binomial(n, j)
            if not c or eq > spread_q or ep > spread_p:
                continue
            for b1 in range(ep, spread_p + 1):
                k1, v1 = fp.coef(ep, b1)
                for b2 in range(eq, spread_q + 1):
                    k2, v2 = fp.coef(eq, b2)
                    key = (b1, b2)
                    if not (k1 and k2):
                        K[key] = None
                    elif v1 and v2:
                        prev = K.get(key, 0)
                        if prev is not None:
                            K[key] = prev + c * v1 * v2
        for ap in range(bp[0], bp[1] + 1):
            for aq in range(bq[0], bq[1] + 1):
                acc = Vector()
                known = True
                for (b1, b2), kv in K.items():
                    if kv == 0:
                        continue
                    x = (ap - b1, aq - b2)
                    if x[0] < lo[0] or x[1] < lo[1]:
                        continue
                    kx, xv = table.get(x, (False, None))
                    if kv is None:
                        if not kx or xv:
                            known = False
                            break
                        continue
                    if not kx:
                        known = False
                        break
                    if xv:
                        acc = acc + xv * kv
                M[(n, ap, aq)] = acc if known else None
    out = {}
    bs = box[s_name]
    for a_s in range(bs[0], bs[1] + 1):
        for ap in range(bp[0], bp[1] + 1):
            for aq in range(bq[0], bq[1] + 1):
                acc = Vector()
                known = True
                for n in range(max(n_lo, -a_s - 1), n_hi + 1):
                    m = M[(n, ap, aq)]
                    ks, cs = fp.coef(-n - 1, a_s)
                    if m is None:
                        if not ks or cs:
                            known = False
                            break
                        continue
                    if not ks:
                        if m:
                            known = False
                            break
                        continue
                    if cs and m:
                        acc = acc + m * cs
                out[(a_s, ap, aq)] = acc if known else None
    return out


def _low_over(fn, labels):
    return principal_floor(fn, labels)


def jacobi_terms(V: VertexStructure, u, v, w, box):
    """Tables of T1, T2, T3 keyed by (x0, x1, x2) exponents (None where unknown)."""
    order = V.order
    f = group_log(V.group, order if order != INF else INF)
    fp = _FPowers(f)
    labels = V.labels
    a12 = apply_field(V.field(u), V.Y(v, w, "x2"), "x1")
    a21 = apply_field(V.field(v), V.Y(u, w, "x1"), "x2")
    b = _right_side(V, u, v, w)
    lo12 = (_low_over(V.field(u), labels), V.Y(v, w).low)
    lo21 = (V.Y(u, w).low, _low_over(V.field(v), labels))
    lo20 = (V.Y(u, v).low, _low_over(V.state_field(w), labels))
    t1 = _jacobi_term(fp, a12, ("x1", "x2"), lo12, box, "x0", "12")
    t2 = _jacobi_term(fp, a21, ("x1", "x2"), lo21, box, "x0", "21")
    t3 = _jacobi_term(fp, b, ("x0", "x2"), lo20, box, "x1", "20")
    out = {}
    for (a0, a1, a2), x in t1.items():
        y = t2[(a0, a1, a2)]
        z = t3[(a1, a0, a2)]
        out[(a0, a1, a2)] = (x, y, z)
    return out


def check_jacobi_F(V: VertexStructure, u, v, w, window=(-5, 5)) -> CheckReport:
    """T1 - T2 = T3 on a box in (x0, x1, x2), each term expanded by binomial sums."""
    box = box_of(window, ("x0", "x1", "x2"))
    inputs = {"u": u, "v": v, "w": w, "group": V.group.name}
    try:
        terms = jacobi_terms(V, u, v, w, box)
    except OverflowBeyondCap as e:
        return CheckReport.insufficient("jacobi", inputs, box, note=str(e))
    compared = 0
    for key in sorted(terms):
        x, y, z = terms[key]
        if x is None or y is None or z is None:
            continue
        compared += 1
        if bool(x - y - z):
            return CheckReport.failed("jacobi", inputs, box, key, x - y, z, compared=compared)
    if compared == 0:
        return CheckReport.insufficient("jacobi", inputs, box, compared=0)
    return CheckReport.passed("jacobi", inputs, box, compared=compared)


# ---------------------------------------------------------------------------
# D-operator definition


def _inverse_fprime(V, order):
    f = group_log(V.group, order)
    if f.order == INF:
        return LaurentSeries.constant(1)
    return f.derivative().inverse(order=f.order - 1)


def check_D_definition(V: VertexStructure, Dmat, window=DEFAULT_WINDOW, panel=None, k_max=DEFAULT_MAX) -> CheckReport:
    """Vacuum/creation, [D, Y(v,x)] = Y(Dv,x) = (1/f'(x)) d/dx Y(v,x), Y(v,x)1 = e^{f(x)D}v,
    and weak commutativity; on success weak F-associativity is cross-checked.
    """
    box = box_of(window, ("x",))
    ws = _panel(V, panel)
    inputs = {"D": {k: str(x) for k, x in sorted(Dmat.items())}, "panel": ws, "group": V.group.name}
    vac = vacuum_check(V)
    if vac.verdict != PASS:
        vac.check = "d-def"
        return vac
    inv_fp = _inverse_fprime(V, V.order)
    for vlab in ws:
        Dv = apply_linear(Dmat, vlab)
        for w in ws:
            try:
                y = V.Y(vlab, w)
                bracket = apply_linear_series(Dmat, y) - V.Yv(vlab, apply_linear(Dmat, w))
                yd = V.Yv(Dv, Vector.basis(w))
            except OverflowBeyondCap:
                continue
            compared, bad = compare_box(bracket, yd, box, ("x",))
            if bad:
                return CheckReport.failed("d-def", inputs, box, bad[0], bad[1], bad[2],
                                          part="bracket", v=vlab, w=w)
            deriv = inv_fp * y.derivative()
            compared, bad = compare_box(yd, deriv, box, ("x",))
            if bad:
                return CheckReport.failed("d-def", inputs, box, bad[0], bad[1], bad[2],
                                          part="derivative", v=vlab, w=w)
        # creation: Y(v, x)1 = e^{f(x)D} v
        try:
            y1 = V.Y(vlab, V.vacuum)
        except OverflowBeyondCap:
            continue
        created = _exp_fD(V, Dmat, vlab, y1.order)
        compared, bad = compare_box(y1, created, box, ("x",))
        if bad:
            return CheckReport.failed("d-def", inputs, box, bad[0], bad[1], bad[2], part="creation", v=vlab)
    for a, b in iproduct(ws, repeat=2):
        r = check_weak_comm(V, a, b, k_max, window, ws)
        if r.verdict != PASS:
            r.check = "d-def"
            r.details["part"] = "weak-comm"
            return r
    agrees = True
    for a, b, c in iproduct(ws, repeat=3):
        r = check_weak_assoc(V, a, b, c, window=window)
        if r.verdict == FAIL:
            agrees = False
    return CheckReport.passed("d-def", inputs, box, weak_assoc_agrees=agrees)


def _exp_fD(V, Dmat, v, order):
    N = order if order != INF else 16
    f = group_log(V.group, N if V.group != fg_builtin("additive") else INF)
    total = LaurentSeries.zero(order)
    fk = LaurentSeries.constant(1)
    vec = Vector.basis(v)
    fact = 1
    k = 0
    while vec and k < N:
        if k:
            fact *= k
            fk = (fk * f).truncate(order)
        total = total + fk * (vec * Fraction(1, fact))
        vec = apply_linear(Dmat, vec)
        k += 1
    if vec and order == INF:
        raise PrecisionExhausted("D is not nilpotent on v; pass a finite order")
    return total


# ---------------------------------------------------------------------------
# g-locality equivalence


def check_g_locality_equiv(a, b, g, k, window=DEFAULT_WINDOW, panel=(), labels=(), order=None) -> CheckReport:
    """Check that multipliers (x1-x2)^k and (g(x1)-g(x2))^k agree on both
    PP-supportedness and symmetric equality of a(x1)b(x2)w, for each w in the panel.

    ``a`` and ``b`` map basis labels to vector-valued series; ``labels``
    is the basis used for the principal-part bound of ``a``.
    """
    box = box_of(window, ("x1", "x2"))
    inputs = {"g": str(g), "k": k, "panel": list(panel)}
    N = order or (g.order if g.order != INF else box["x2"][1] + box["x1"][1] + 4)
    floor = principal_floor(a, labels or panel)
    compared_total = 0
    results = {}
    for w in panel:
        try:
            a12, a21 = _products(a, b, w)
        except OverflowBeyondCap:
            continue
        flags = {}
        for name, gg in (("x", None), ("g", g)):
            left = difference_power(k, "x2", "x1", gg, N) * a12
            right = difference_power(k, "x1", "x2", gg, N) * a21
            pp = pp_violation(left, floor, {"x2": box["x2"]}) is None
            compared, bad = compare_box(left, right, box, ("x1", "x2"))
            compared_total += compared
            flags[name] = (pp, bad)
        results[w] = flags
        (ppx, badx), (ppg, badg) = flags["x"], flags["g"]
        if ppx != ppg:
            return CheckReport.failed("g-equiv", inputs, box, (0, 0), int(ppx), int(ppg),
                                      part="pp-support", w=w)
        if (badx is None) != (badg is None):
            bad = badx or badg
            return CheckReport.failed("g-equiv", inputs, box, bad[0], bad[1], bad[2], part="equality", w=w)
    if compared_total == 0:
        return CheckReport.insufficient("g-equiv", inputs, box, compared=0)
    equal = all(r["x"][1] is None for r in results.values())
    return CheckReport.passed("g-equiv", inputs, box, compared=compared_total, equality_holds=equal)
