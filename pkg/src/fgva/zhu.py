"""Graded structures, the Zhu change of variables and phi-coordinated modules.

For a Z-graded structure V the Zhu transform is
Y[v, x] = Y(e^{x L(0)} v, e^x - 1), and a graded module (W, Y_W) becomes a
phi-coordinated module for phi(x, z) = x e^z via X_W(v, x) = Y_W(x^{L(0)} v, x).
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product as iproduct

from .associate import Associate, assoc_from_p
from .bivar import MPoly, diagonal_substitute, shift_part, taylor_substitute
from .errors import DomainViolation, OverflowBeyondCap, PrecisionExhausted
from .formal_group import FormalGroupLaw, fg_builtin
from .harness import DEFAULT_MAX, box_of, difference_power, principal_floor, pp_violation
from .linear import Vector
from .report import PASS, CheckReport, compare_box
from .series import INF, LaurentSeries, compose, exp_series, expm1_series, is_gseries, var_series
from .vertex import VertexStructure, apply_field, as_vector, d_operator

_T_POWER = re.compile(r"^(?:(?P<prefix>[A-Za-z0-9]+)\*)?t(?:\^(?P<exp>\d+))?$")


def t_degree(label):
    """Power of t in a label such as "1", "t", "t^3" or "E12*t^2"."""
    if label == "1" or re.fullmatch(r"[A-Z][0-9]+", label):
        return 0
    m = _T_POWER.match(label)
    if not m:
        raise ValueError(f"no t-degree for label {label!r}")
    return int(m.group("exp") or 1)


def t_grading(labels, sign=-1):
    """deg t^n = sign*n on every label."""
    return {b: sign * t_degree(b) for b in labels}


def _deg(deg, label):
    return deg(label) if callable(deg) else deg[label]


def homogeneous_parts(vec, deg):
    out = {}
    for lab, c in as_vector(vec).items():
        d = _deg(deg, lab)
        out[d] = out.get(d, Vector()) + Vector({lab: c})
    return out


# ---------------------------------------------------------------------------
# grading


def grading_check(V: VertexStructure, deg, labels=None) -> CheckReport:
    """u_n V_(k) in V_(m+k-n-1) for u in V_(m), on every stored table coefficient.

    Pairs with a non-vacuum u and v are scanned first, then the vacuum
    pairs.  The witness exponents are (n, k); the offending basis vector
    is the witness component and ``u`` is recorded in the details.
    """
    labels = list(labels or V.labels)
    inputs = {"grading": {b: _deg(deg, b) for b in labels}}
    window = {"order": V.order}
    one = V.vacuum
    body = [b for b in labels if b != one]
    pairs = [(u, v) for u in body for v in body] + [(u, one) for u in labels] + [(one, v) for v in body]
    if _deg(deg, one) != 0:
        return CheckReport.failed("grading", inputs, window, (0, 0), _deg(deg, one), 0, part="vacuum")
    compared = 0
    for u, v in pairs:
        try:
            s = V.Y(u, v)
        except OverflowBeyondCap:
            continue
        m, k = _deg(deg, u), _deg(deg, v)
        for j, vec in s.items():
            n = -j - 1
            want = m + k - n - 1
            for lab, c in vec.items():
                compared += 1
                got = _deg(deg, lab)
                if got != want:
                    r = CheckReport.failed("grading", inputs, window, (n, k), got, want, u=u, v=v)
                    r.witness.component = lab
                    r.details["triple"] = (u, n, k)
                    return r
    return CheckReport.passed("grading", inputs, window, compared=compared)


def l0_conjugation_check(V: VertexStructure, deg, window=5, panel=None) -> CheckReport:
    """x^{L(0)} Y(v,x1) x^{-L(0)} = Y(x^{L(0)}v, x x1) and the e^{x L(0)} analogue.

    Both are compared as series in (x, x1) for basis v, w in the panel;
    the exponential form is known modulo x^window.
    """
    panel = list(panel or V.labels[:4])
    box = {"x1": (-window, window), "x": (-window, window)}
    inputs = {"panel": panel}
    compared = 0
    for v, w in iproduct(panel, repeat=2):
        try:
            s = V.Y(v, w, "x1")
        except OverflowBeyondCap:
            continue
        dv, dw = _deg(deg, v), _deg(deg, w)
        # power form: a coefficient x1^j of degree d picks up x^(d - dw) on the left, x^(j + dv) on the right
        left_rows, right_rows = {}, {}
        eleft_rows, eright_rows = {}, {}
        for j, vec in s.items():
            lrow = LaurentSeries.zero(var="x")
            elrow = LaurentSeries.zero(window, "x")
            for d, part in homogeneous_parts(vec, deg).items():
                lrow = lrow + LaurentSeries.monomial(d - dw, var="x") * part
                elrow = elrow + exp_series(window, "x", d - dw) * part
            left_rows[j] = lrow
            right_rows[j] = LaurentSeries.monomial(j + dv, var="x") * vec
            eleft_rows[j] = elrow
            eright_rows[j] = (exp_series(window, "x", dv) * exp_series(window, "x", j)) * vec
        for name, L, R in (("power", left_rows, right_rows), ("exponential", eleft_rows, eright_rows)):
            lhs = LaurentSeries(L, s.order, "x1")
            rhs = LaurentSeries(R, s.order, "x1")
            c, bad = compare_box(lhs, rhs, box, ("x1", "x"))
            compared += c
            if bad:
                return CheckReport.failed("l0-conjugation", inputs, box, bad[0], bad[1], bad[2],
                                          form=name, v=v, w=w)
    if compared == 0:
        return CheckReport.insufficient("l0-conjugation", inputs, box)
    return CheckReport.passed("l0-conjugation", inputs, box, compared=compared)


def zhu_transform(V: VertexStructure, deg, order) -> VertexStructure:
    """Y[v, x] = Y(e^{x L(0)} v, e^x - 1) modulo x^order."""
    if order == INF:
        raise PrecisionExhausted("the Zhu transform needs a finite order")
    if V.group != fg_builtin("additive"):
        raise DomainViolation("the Zhu transform applies to structures over the additive law")
    g = expm1_series(order + 1)

    def pair(v, w):
        h = compose(V.Y(v, w), g, order)
        return (exp_series(order, "x", _deg(deg, v)) * h).truncate(order)

    space = V.space.regraded({b: _deg(deg, b) for b in V.labels})
    return VertexStructure(space, V.vacuum, pair, V.group, order, ("zhu", V.provenance))


# ---------------------------------------------------------------------------
# modules


class ModuleStructure:
    """A module W for a vertex structure, with Y_W(v, x)w on basis pairs.

    ``kind`` is one of "module", "quasi", "phi", "phi-quasi"; phi-kinds
    carry their associate.
    """

    KINDS = ("module", "quasi", "phi", "phi-quasi")

    def __init__(self, algebra: VertexStructure, space, pair, kind="module", phi=None, order=INF,
                 provenance=None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown module kind {kind!r}")
        if kind.startswith("phi") and phi is None:
            raise ValueError("phi-coordinated modules need their associate")
        self.algebra = algebra
        self.space = space
        self._pair = pair
        self._cache = {}
        self.kind = kind
        self.phi = phi
        self.order = order
        self.provenance = provenance or ("explicit",)
        for w in space.labels:
            s = self.Y(algebra.vacuum, w)
            if not s.agrees(LaurentSeries.constant(Vector.basis(w))) or s.order <= 0:
                raise DomainViolation(f"Y_W(1, x) is not the identity on {w}")

    def __repr__(self):
        return f"ModuleStructure({self.kind}, dim={self.space.dim}, over {self.algebra!r})"

    def Y(self, v, w, var="x"):
        s = self._cache.get((v, w))
        if s is None:
            s = self._pair(v, w)
            self._cache[(v, w)] = s
        return s if var == "x" else s.rename(var)

    def field(self, v):
        return lambda w: self.Y(v, w)

    def state_field(self, w):
        return lambda v: self.Y(v, w)

    def Yv(self, v, s, var="x"):
        total = None
        for lab, c in as_vector(v).items():
            term = apply_field(self.field(lab), s, var) * c
            total = term if total is None else total + term
        return apply_field(lambda _: LaurentSeries.zero(), s, var) if total is None else total

    def retag(self, kind=None, phi=None, algebra=None):
        return ModuleStructure(algebra or self.algebra, self.space, self._pair, kind or self.kind,
                               phi if phi is not None else self.phi, self.order, self.provenance)


def adjoint_module(V: VertexStructure) -> ModuleStructure:
    return ModuleStructure(V, V.space, V.Y, "module", order=V.order, provenance=("adjoint",))


def xw_map(M: ModuleStructure, deg, order) -> ModuleStructure:
    """X_W(v, x) = Y_W(x^{L(0)} v, x), a module over the Zhu transform coordinated by x e^z."""
    algebra = zhu_transform(M.algebra, deg, order)
    phi = assoc_from_p(fg_builtin("additive"), var_series("x"), order)
    quasi = M.kind == "quasi"

    def pair(v, w):
        return M.Y(v, w).shift(_deg(deg, v))

    return ModuleStructure(algebra, M.space, pair, "phi-quasi" if quasi else "phi", phi, M.order,
                           ("xw", M.provenance))


def module_transform(M: ModuleStructure, g: LaurentSeries, kind="coordinate-change", order=None) -> ModuleStructure:
    """coordinate-change: Y_W(v, g(x)) over V_g, coordinated by g^{-1}(phi(g(x), g(z)));
    retime: the same tables coordinated by phi(x, g(z)) over V_g.
    """
    from .associate import assoc_transform
    from .vertex import change_variables

    if not is_gseries(g):
        raise DomainViolation("module transforms need g(0) = 0 and g'(0) = 1")
    if g.order == INF and g.coeffs == {1: 1}:
        return M
    N = order or min(g.order - 1, M.algebra.order if M.algebra.order != INF else g.order - 1)
    algebra = change_variables(M.algebra, g, N + 1)
    phi = M.phi
    if kind == "coordinate-change":
        if phi is not None:
            phi = assoc_transform(phi, g, "conjugate", order=min(N, phi.z_order))

        def pair(v, w):
            return compose(M.Y(v, w), g.rename("x"), N)

        return ModuleStructure(algebra, M.space, pair, M.kind, phi, N, ("coordinate-change", M.provenance))
    if kind == "retime":
        if phi is None:
            raise DomainViolation("retime needs a phi-coordinated module")
        phi = assoc_transform(phi, g, "retime", order=min(N, phi.z_order))
        return M.retag(phi=phi, algebra=algebra)
    raise ValueError(f"unknown module transform {kind!r}")


# ---------------------------------------------------------------------------
# module axioms


def phi_nested(phi, outer="x0", inner="x2"):
    """phi(inner, outer) as a nested series with ``outer`` outermost."""
    s = phi.phi if isinstance(phi, Associate) else phi
    return LaurentSeries({k: r.rename(inner) for k, r in s.coeffs.items()}, s.order, outer)


def _q_table(q):
    if q is None:
        return None
    if isinstance(q, MPoly):
        return dict(q.coeffs)
    if isinstance(q, str):
        from .literals import parse_multivariate

        coeffs, _ = parse_multivariate(q, ("x1", "x2"))
        return coeffs
    return dict(q)


def _q_nested(table, outer, inner):
    """q(x1, x2) as a nested series; x1 is ``inner`` when outer is "x2"."""
    rows = {}
    for (i, j), c in table.items():
        e_out, e_in = (j, i) if outer == "x2" else (i, j)
        rows.setdefault(e_out, {})[e_in] = c
    return LaurentSeries({e: LaurentSeries(r, INF, inner) for e, r in rows.items()}, INF, outer)


def _q_on_phi(table, phin):
    """q(phi(x2, x0), x2) nested with x0 outermost."""
    total = None
    cache = {0: LaurentSeries.constant(LaurentSeries.constant(1, "x2"), "x0")}
    for (i, j), c in sorted(table.items()):
        for m in range(max(cache) + 1, i + 1):
            cache[m] = (cache[m - 1] * phin).truncate(phin.order)
        term = cache[i] * LaurentSeries.monomial(j, c, "x2")
        total = term if total is None else total + term
    return total.truncate(phin.order)


def _phi_P(M, u, v, w, q_table):
    """q(x1, x2)Y_W(u, x1)Y_W(v, x2)w nested with x2 outermost."""
    a12 = apply_field(M.field(u), M.Y(v, w, "x2"), "x1")
    return _q_nested(q_table, "x2", "x1") * a12


def phi_assoc_sides(M, u, v, w, phi, q_table, box, floor=None, P=None):
    """Both sides of weak phi-associativity, nested with x0 outermost."""
    P = _phi_P(M, u, v, w, q_table) if P is None else P
    phin = phi_nested(phi)
    if floor is None and not (P.order == INF and all(r.order == INF for r in P.coeffs.values())):
        floor = _module_floor(M, u, w)
    lhs = diagonal_substitute(P, "x1", "x2", shift_part(phin), floor=floor, order=min(box["x0"][1] + 1, phin.order))
    alg_uv = M.algebra.Y(u, v, "x0")
    b = apply_field(M.state_field(w), alg_uv, "x2")
    rhs = _q_on_phi(q_table, phin) * b
    return P, lhs, rhs


def _module_floor(M, u, w):
    """Lower bound for x1-exponents of q(x1, x2)Y_W(u, x1)Y_W(v, x2)w."""
    custom = getattr(M, "pp_floor", None)
    if custom is not None:
        return custom(u, w)
    return principal_floor(M.field(u), M.space.labels)


def _k_table(k):
    return {(i, k - i): Fraction(_binom(k, i) * (-1) ** (k - i)) for i in range(k + 1)}


def _binom(n, k):
    from math import comb

    return comb(n, k)


def check_phi_assoc(M: ModuleStructure, u, v, w, phi=None, q=None, k_max=DEFAULT_MAX, window=(-6, 6)) -> CheckReport:
    """Weak phi-associativity for one triple.  With ``q`` absent, q = (x1-x2)^k is searched."""
    phi = phi or M.phi
    box = box_of(window, ("x0", "x2"))
    inputs = {"u": u, "v": v, "w": w, "phi": phi.text() if isinstance(phi, Associate) else str(phi)}
    tables = [(None, _q_table(q))] if q is not None else [(k, _k_table(k)) for k in range(k_max + 1)]
    floor = _module_floor(M, u, w)
    last = None
    for k, table in tables:
        try:
            P = _phi_P(M, u, v, w, table)
            # any stored term below the floor blocks the substitution, so scan every row
            viol = pp_violation(P, floor, {"x2": (-10 ** 6, 10 ** 6)})
            if viol is not None:
                last = (viol[0], viol[1], Vector())
                continue
            P, lhs, rhs = phi_assoc_sides(M, u, v, w, phi, table, box, floor, P)
        except OverflowBeyondCap as e:
            return CheckReport.insufficient("phi-assoc", inputs, box, note=str(e))
        compared, bad = compare_box(lhs, rhs, box, ("x0", "x2"))
        if bad is None and compared:
            return CheckReport.passed("phi-assoc", inputs, box, k, compared=compared)
        if bad is None:
            return CheckReport.insufficient("phi-assoc", inputs, box, compared=0)
        last = bad
    note = "the given q does not balance the sides" if q is not None else "no admissible q in the search range"
    return CheckReport.failed("phi-assoc", inputs, box, last[0], last[1], last[2], note=note)


def _module_weak_assoc(M, u, v, w, l_max, box):
    """Def. module form: F(x0,x2)^l Y_W(u,F(x0,x2))Y_W(v,x2)w = F^l Y_W(Y(u,x0)v,x2)w."""
    F = M.algebra.group
    a12 = apply_field(M.field(u), M.Y(v, w, "x2"), "x1")
    lhs = taylor_substitute(a12, "x1", "x0", shift_part(F.nested(("x0", "x2"))), order=box["x2"][1] + 1)
    rhs = apply_field(M.state_field(w), M.algebra.Y(u, v, "x0"), "x2")
    lm = LaurentSeries.constant(LaurentSeries.constant(1, "x0"), "x2")
    rm = LaurentSeries.constant(LaurentSeries.constant(1, "x2"), "x0")
    last = None
    for l in range(l_max + 1):
        if l:
            lm = lm * F.nested(("x0", "x2"))
            rm = rm * F.nested(("x2", "x0"))
        compared, bad = compare_box(lm * lhs, rm * rhs, box, ("x0", "x2"))
        if bad is None:
            return l, compared, None
        last = bad
    return None, 0, last


def check_module(M: ModuleStructure, variant="module", params=None, window=(-6, 6), panel=None,
                 test_vectors=None, k_max=DEFAULT_MAX) -> CheckReport:
    """Check a module axiom system on a panel of (u, v) and test vectors w.

    variant "module": weak associativity with an l search, cross-checked
    against the (x1-x2)^k form with x1 = F(x2, x0); "quasi": the form with
    a given q and x1 = x2 + x0; "phi": q = (x1-x2)^k searched; "phi-quasi":
    q from params.  ``params`` may carry "phi" (an Associate) and "q".
    """
    params = params or {}
    box = box_of(window, ("x0", "x2"))
    us = list(panel or M.algebra.labels[:3])
    ws = list(test_vectors or M.space.labels[:5])
    phi = params.get("phi") or M.phi
    inputs = {"variant": variant, "panel": us, "vectors": ws,
              "phi": phi.text() if isinstance(phi, Associate) else None}
    reports = []
    for u, v, w in iproduct(us, us, ws):
        if variant == "module":
            try:
                l, compared, bad = _module_weak_assoc(M, u, v, w, params.get("l_max", DEFAULT_MAX), box)
            except OverflowBeyondCap:
                continue
            if bad is not None:
                return CheckReport.failed("module", inputs, box, bad[0], bad[1], bad[2], u=u, v=v, w=w)
            F = M.algebra.group
            assoc_F = Associate(F.nested(("x", "z")).truncate(box["x0"][1] + 2), F, check=False) \
                if F.order == INF else None
            if assoc_F is not None:
                alt = check_phi_assoc(M, u, v, w, assoc_F, None, k_max, window)
                if alt.verdict == "fail":
                    alt.details["note"] = "alternative form disagrees"
                    alt.check = "module"
                    return alt
            reports.append(CheckReport.passed("module", inputs, box, l, compared=compared))
            continue
        if variant == "quasi":
            q = params.get("q")
            if q is None:
                raise ValueError("quasi modules need q in params")
            add = Associate(fg_builtin("additive").nested(("x", "z")).truncate(box["x0"][1] + 2),
                            fg_builtin("additive"), check=False)
            r = check_phi_assoc(M, u, v, w, add, q, k_max, window)
        elif variant == "phi":
            r = check_phi_assoc(M, u, v, w, phi, None, k_max, window)
        elif variant == "phi-quasi":
            q = params.get("q")
            if q is None:
                raise ValueError("phi-quasi modules need q in params")
            r = check_phi_assoc(M, u, v, w, phi, q, k_max, window)
        else:
            raise ValueError(f"unknown variant {variant!r}")
        if r.verdict == "fail":
            r.check = variant
            r.details.update(u=u, v=v, w=w)
            return r
        reports.append(r)
    if not reports or all(r.verdict != PASS for r in reports):
        return CheckReport.insufficient(variant, inputs, box)
    mult = max((r.multiplier or 0) for r in reports)
    return CheckReport.passed(variant, inputs, box, mult, compared=sum(r.details.get("compared", 0) for r in reports),
                              triples=len(reports))


# ---------------------------------------------------------------------------
# D-property and commutator formula for x e^z coordinated modules


def check_phi_D_and_commutator(M: ModuleStructure, window=5, z_order=3, panel=None, test_vectors=None,
                               commutator_pairs=None) -> CheckReport:
    """(i) Y_W(Dv, x) = x d/dx Y_W(v, x) and Y_W(e^{zD} v, x) = Y_W(v, x e^z) to z-order;
    (ii) [Y_W(u,x1), Y_W(v,x2)]w = sum_j Y_W(u_j v, x2) (x2 d/dx2)^j delta(x2/x1) / j!
    coefficientwise on the box.
    """
    us = list(panel or M.algebra.labels[:3])
    ws = list(test_vectors or M.space.labels[:5])
    box1 = {"x": (-window, window)}
    box2 = {"z": (0, z_order - 1), "x": (-window, window)}
    inputs = {"panel": us, "vectors": ws}
    D = d_operator(M.algebra)
    compared = 0
    for v, w in iproduct(us, ws):
        try:
            s = M.Y(v, w)
            dv = D.get(v, Vector())
            yd = M.Yv(dv, Vector.basis(w))
        except OverflowBeyondCap:
            continue
        xdx = s.derivative().shift(1)
        c, bad = compare_box(yd, xdx, box1, ("x",))
        compared += c
        if bad:
            return CheckReport.failed("phi-d", inputs, box1, bad[0], bad[1], bad[2], part="derivative", v=v, w=w)
        # e^{zD} form: row z^k of the left is Y_W(D^k v, x)w / k!
        rows_l, rows_r = {}, {}
        vec = Vector.basis(v)
        fact = 1
        for k in range(z_order):
            if k:
                fact *= k
                vec = _apply(D, vec)
            rows_l[k] = M.Yv(vec, Vector.basis(w)) * Fraction(1, fact)
        lhs = LaurentSeries(rows_l, z_order, "z")
        rhs = None
        for j, c0 in s.items():
            # Y_W(v, x e^z) = sum_j c_j x^j e^{j z}
            term = LaurentSeries({e: LaurentSeries.monomial(j, c0 * a) for e, a in exp_series(z_order, "z", j).items()},
                                 z_order, "z")
            rhs = term if rhs is None else rhs + term
        if rhs is None:
            rhs = LaurentSeries.zero(z_order, "z")
        else:
            rhs = LaurentSeries(rhs.coeffs, z_order, "z").map(lambda r: LaurentSeries(r.coeffs, s.order, "x"))
        c, bad = compare_box(lhs, rhs, box2, ("z", "x"))
        compared += c
        if bad:
            return CheckReport.failed("phi-d", inputs, box2, bad[0], bad[1], bad[2], part="exponential", v=v, w=w)
    pairs = commutator_pairs or list(iproduct(us, repeat=2))
    cbox = {"x1": (-window, window), "x2": (-window, window)}
    for (u, v), w in iproduct(pairs, ws):
        try:
            c, bad = commutator_formula(M, u, v, w, cbox)
        except OverflowBeyondCap:
            continue
        compared += c
        if bad:
            return CheckReport.failed("phi-commutator", inputs, cbox, bad[0], bad[1], bad[2], u=u, v=v, w=w)
    if compared == 0:
        return CheckReport.insufficient("phi-d-commutator", inputs, box1)
    return CheckReport.passed("phi-d-commutator", inputs, box1, compared=compared)


def _apply(D, vec):
    out = Vector()
    for lab, c in vec.items():
        out = out + D.get(lab, Vector()) * c
    return out


def commutator_formula(M: ModuleStructure, u, v, w, box):
    """Compare [Y_W(u,x1), Y_W(v,x2)]w with the delta-function formula on the box.

    Coefficient (a1, a2) of the right side is
    sum_j (-a1)^j / j! [x2^(a1+a2)] Y_W(u_j v, x2)w.
    """
    from .series import lookup

    a12 = apply_field(M.field(u), M.Y(v, w, "x2"), "x1")
    a21 = apply_field(M.field(v), M.Y(u, w, "x1"), "x2")
    yuv = M.algebra.Y(u, v)
    if yuv.order <= -1 and yuv.low < 0:
        raise PrecisionExhausted("singular part of Y(u, x)v is not known")
    modes = {}
    for e, vec in yuv.items():
        if e < 0:
            modes[-e - 1] = M.Yv(vec, Vector.basis(w), "x2")
    compared = 0
    for a1 in range(box["x1"][0], box["x1"][1] + 1):
        for a2 in range(box["x2"][0], box["x2"][1] + 1):
            e = {"x1": a1, "x2": a2}
            k1, l1 = lookup(a12, e)
            k2, l2 = lookup(a21, e)
            if not (k1 and k2):
                continue
            rhs = Vector()
            known = True
            fact = 1
            for j in sorted(modes):
                s = modes[j]
                if a1 + a2 >= s.order:
                    known = False
                    break
                c = s.coefficient(a1 + a2, Vector())
                fj = 1
                for i in range(2, j + 1):
                    fj *= i
                rhs = rhs + c * (Fraction(-a1) ** j / fj)
            if not known:
                continue
            compared += 1
            lhs = l1 - l2
            if bool(lhs - rhs):
                return compared, ((a1, a2), lhs, rhs)
    return compared, None
