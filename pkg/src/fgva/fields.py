"""Fields on a space W, their phi-products and the algebra they generate.

A field a(x) in Hom(W, W((x))) is stored extensionally: for each basis
monomial w it returns a vector-valued Laurent series in x with an exact
lower end and a tracked upper precision.  The flagship space is the
Heisenberg Fock space C[y_1, ..., y_N] with h(x) = sum_n h_n x^{-n-1},
h_{-n} = y_n and h_n = n d/dy_n for n >= 1.

The product of two fields along an associate phi is

    Y_E(a, z)b = p(phi(x, z), x)^{-1} (p(x1, x) a(x1) b(x))|_{x1 = phi(x, z)}

for any p that makes the pair compatible.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product as iproduct
from math import comb

from .associate import Associate, assoc_from_p, nonvanishing_probe
from .bivar import MPoly, diagonal_substitute, shift_part
from .errors import (BasisExplosion, IncompatiblePair, InsufficientPrecision, OverflowBeyondCap,
                     PrecisionExhausted, UnboundedPrincipalPart)
from .formal_group import fg_log
from .harness import box_of, pp_violation
from .linear import Vector
from .literals import format_multivariate, parse_multivariate
from .report import CheckReport, compare_box
from .series import INF, LaurentSeries, compose, lookup
from .vertex import StateSpace, VertexStructure, apply_field, as_vector
from .zhu import ModuleStructure, _q_nested, _q_on_phi, phi_nested

_MONO = re.compile(r"^y(\d+)(?:\^(\d+))?$")


# ---------------------------------------------------------------------------
# the Fock space


class FockSpace:
    """Polynomials in y_1, ..., y_N, with y_n of weight n.

    Every monomial is a valid state; ``weight_cap`` only selects the finite
    panel of test vectors (``labels``).  ``modes`` = N bounds the creation
    operators that exist, so h(x)w is known modulo x^N.
    """

    def __init__(self, weight_cap=3, modes=6):
        if weight_cap < 0 or modes < 1:
            raise ValueError("need weight_cap >= 0 and modes >= 1")
        self.weight_cap = weight_cap
        self.modes = modes
        labels = [self.label(e) for e in self.monomials(weight_cap)]
        self.state_space = StateSpace(labels, {b: self.weight(b) for b in labels}, weight_cap, "fock")

    def __repr__(self):
        return f"FockSpace(weight_cap={self.weight_cap}, modes={self.modes})"

    @property
    def labels(self):
        return self.state_space.labels

    def monomials(self, max_weight):
        """Exponent tuples of total weight <= max_weight, by weight then lexicographically."""
        out = []

        def rec(n, left, prefix):
            if n > self.modes:
                out.append(tuple(prefix))
                return
            for k in range(left // n + 1):
                rec(n + 1, left - k * n, prefix + [k])

        rec(1, max_weight, [])
        return sorted(out, key=lambda e: (self._w(e), tuple(-x for x in e)))

    @staticmethod
    def _w(exps):
        return sum((i + 1) * k for i, k in enumerate(exps))

    def label(self, exps):
        parts = [f"y{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(exps) if k]
        return "*".join(parts) if parts else "1"

    def exponents(self, label):
        exps = [0] * self.modes
        if label == "1":
            return tuple(exps)
        for part in label.split("*"):
            m = _MONO.match(part)
            if not m or not 1 <= int(m.group(1)) <= self.modes:
                raise ValueError(f"not a Fock monomial: {label!r}")
            exps[int(m.group(1)) - 1] += int(m.group(2) or 1)
        return tuple(exps)

    def weight(self, label):
        return self._w(self.exponents(label))


# ---------------------------------------------------------------------------
# fields


class Field:
    """A field on a Fock space: ``act(label)`` gives a(x)w as a vector-valued series.

    ``degree`` d means the x^e coefficient of a(x)w has weight wt(w) + e + d.
    """

    def __init__(self, space: FockSpace, act, name, degree=None):
        self.space = space
        self._act = act
        self._cache = {}
        self.name = name
        self.degree = degree

    def __repr__(self):
        return f"Field({self.name})"

    def __call__(self, w) -> LaurentSeries:
        s = self._cache.get(w)
        if s is None:
            s = self._act(w)
            self._cache[w] = s
        return s

    def floor(self, w):
        """Least x-exponent of a(x)u over monomials u of weight <= wt(w).

        This is the bound assumed for the x1-principal part of
        p(x1, x)a(x1)b(x)w; compatibility checks test it on windows.
        """
        cap = self.space.weight(w)
        lows = [min(s.coeffs) for s in (self(u) for u in map(self.space.label, self.space.monomials(cap)))
                if s.coeffs]
        return min(lows, default=0)


def identity_field(space: FockSpace) -> Field:
    return Field(space, lambda w: LaurentSeries.constant(Vector.basis(w)), "1", 0)


def scalar_field(space: FockSpace, s: LaurentSeries, name=None, degree=None) -> Field:
    """w -> s(x) w for a scalar Laurent series s."""
    return Field(space, lambda w: s.map(lambda c: Vector.basis(w) * c), name or f"({s})*1", degree)


def heisenberg(space: FockSpace) -> Field:
    """h(x) = sum_{n != 0} h_n x^{-n-1} with h_0 = 0, known modulo x^N."""

    def act(w):
        exps = space.exponents(w)
        out = {}
        for n in range(1, space.modes + 1):
            k = exps[n - 1]
            if k:
                lower = list(exps)
                lower[n - 1] -= 1
                out[-n - 1] = Vector({space.label(lower): n * k})
            upper = list(exps)
            upper[n - 1] += 1
            out[n - 1] = Vector.basis(space.label(upper))
        return LaurentSeries(out, space.modes, "x")

    return Field(space, act, "h", 1)


def heisenberg_modes(space: FockSpace, n, w) -> Vector:
    """h_n w computed directly from the oscillator rules."""
    exps = list(space.exponents(w))
    if n == 0:
        return Vector()
    if n < 0:
        if -n > space.modes:
            raise OverflowBeyondCap(f"mode y{-n} lies outside the window")
        exps[-n - 1] += 1
        return Vector.basis(space.label(exps))
    if n > space.modes or not exps[n - 1]:
        return Vector()
    k = exps[n - 1]
    exps[n - 1] -= 1
    return Vector({space.label(exps): n * k})


# ---------------------------------------------------------------------------
# compatibility and the phi-product


def _p_table(p):
    if p is None:
        return {(0, 0): Fraction(1)}
    if isinstance(p, MPoly):
        return dict(p.coeffs)
    if isinstance(p, str):
        coeffs, _ = parse_multivariate(p, ("x1", "x2"))
        return coeffs
    return dict(p)


def _p_degree(table):
    """Common total degree of a homogeneous p, or None."""
    degs = {i + j for (i, j), c in table.items() if c}
    return degs.pop() if len(degs) == 1 else None


def _p_total_degree(table):
    return max((i + j for (i, j), c in table.items() if c), default=0)


def _phi_series(phi):
    return phi.phi if isinstance(phi, Associate) else phi


def _product_side(a: Field, b: Field, table, w):
    """p(x1, x2) a(x1) b(x2) w nested with x2 outermost."""
    ab = apply_field(a, b(w).rename("x2"), "x1")
    return _q_nested(table, "x2", "x1") * ab


def compatibility_check(a: Field, b: Field, p, phi, window=(-5, 5), panel=None) -> CheckReport:
    """p(x1, x2)a(x1)b(x2)w has no x1-principal part below a's floor, and p(phi(x, z), x) != 0.

    The first part is tested on every known coefficient with x2-exponent
    in the window, for each w in the panel.
    """
    table = _p_table(p)
    space = a.space
    ws = list(panel or space.labels)
    box = box_of(window, ("x1", "x2"))
    inputs = {"a": a.name, "b": b.name, "p": format_multivariate(table, ("x1", "x2"))}
    compared = 0
    for w in ws:
        P = _product_side(a, b, table, w)
        floor = a.floor(w)
        bad = pp_violation(P, floor, box)
        if bad is not None:
            exps, value = bad[0], bad[1]
            r = CheckReport.failed("compatibility", inputs, box, exps, value, Vector(), w=w, floor=floor)
            return r
        compared += sum(len(r.coeffs) for r in P.coeffs.values())
    probe = nonvanishing_probe(table, phi)
    if not probe.ok:
        return CheckReport.insufficient("compatibility", inputs, box, note="p(phi(x, z), x) not shown nonzero",
                                        probe=probe.to_json())
    return CheckReport.passed("compatibility", inputs, box, compared=compared,
                              diagonal_witness=probe.details.get("witness_exponents"))


class PhiProduct:
    """Y_E(a, z)b for one pair of fields, computed per state and cached.

    ``series(w)`` is the z-series (z outermost, coefficients in x) of
    Y_E(a, z)b applied to w; ``field(n)`` is the coefficient field a_n b of
    z^{-n-1}.
    """

    def __init__(self, a: Field, b: Field, p, phi: Associate, z_order):
        self.a, self.b = a, b
        self.table = _p_table(p)
        self.z_order = z_order
        need = z_order + 2 * _p_total_degree(self.table) + 1
        if isinstance(phi, Associate) and phi.p is not None and phi.z_order < need:
            # an associate built from p can be extended exactly
            phi = assoc_from_p(phi.group, phi.p, need)
        self.phi = phi
        self.phin = phi_nested(_phi_series(phi), "x0", "x2")
        Q = _q_on_phi(self.table, self.phin)
        try:
            v, lead = Q.leading()
        except PrecisionExhausted as e:
            raise IncompatiblePair(f"p(phi(x, z), x) is not known to be nonzero: {e}") from e
        self.valuation = v
        if self.phin.order < z_order + 2 * v + 1:
            raise InsufficientPrecision(
                f"the associate is known modulo z^{self.phin.order}; need z^{z_order + 2 * v + 1}")
        self.Qinv = Q.truncate(z_order + 2 * v + 1).inverse()
        self._cache = {}

    def series(self, w) -> LaurentSeries:
        s = self._cache.get(w)
        if s is None:
            s = self._compute(w)
            self._cache[w] = s
        return s

    def _compute(self, w):
        P = _product_side(self.a, self.b, self.table, w)
        floor = self.a.floor(w)
        try:
            S = diagonal_substitute(P, "x1", "x2", shift_part(self.phin), floor=floor,
                                    order=self.z_order + self.valuation)
        except UnboundedPrincipalPart as e:
            raise IncompatiblePair(f"{self.a.name}, {self.b.name} at {w}: {e}") from e
        R = (S * self.Qinv).truncate(self.z_order)
        return LaurentSeries({k: r.rename("x") for k, r in R.coeffs.items()}, R.order, "z")

    def coefficient(self, k, w) -> LaurentSeries:
        s = self.series(w)
        if k >= s.order:
            raise PrecisionExhausted(f"z^{k} of Y({self.a.name}, z){self.b.name} is beyond the z-order")
        return s.coeffs.get(k, LaurentSeries.zero(_row_order(s), "x"))

    def field(self, n) -> Field:
        k = -n - 1
        deg = None if self.a.degree is None or self.b.degree is None else self.a.degree + self.b.degree
        return Field(self.a.space, lambda w: self.coefficient(k, w), product_name(self.a.name, n, self.b.name), deg)

    def lowest(self):
        """Least z-exponent that can occur: -(valuation of p(phi(x, z), x))."""
        return -self.valuation


def product_name(a, n, b):
    """Unambiguous name of a_(n)b; compound operands are parenthesized."""
    wrap = lambda s: f"({s})" if "_(" in s else s
    return f"{wrap(a)}_({n}){wrap(b)}"


def _row_order(s):
    orders = [r.order for r in s.coeffs.values()]
    return min(orders, default=INF)


def y_phi_product(a: Field, b: Field, p, phi: Associate, z_order=4) -> PhiProduct:
    """Y_E(a(x), z)b(x) modulo z^z_order; see :class:`PhiProduct`."""
    return PhiProduct(a, b, p, phi, z_order)


def _difference_power(k):
    return {(i, k - i): Fraction(comb(k, i) * (-1) ** (k - i)) for i in range(k + 1)}


def least_compatible_p(a: Field, b: Field, k_max=8, panel=None):
    """(x1 - x2)^k for the least k <= k_max that passes the principal-part test on the panel."""
    ws = list(panel or a.space.labels)
    box = {"x2": (-10 ** 6, 10 ** 6)}
    for k in range(k_max + 1):
        table = _difference_power(k)
        if all(pp_violation(_product_side(a, b, table, w), a.floor(w), box) is None for w in ws):
            return table
    raise IncompatiblePair(f"no (x1 - x2)^k with k <= {k_max} clears {a.name}(x1){b.name}(x2)")


def compare_products(A: PhiProduct, B: PhiProduct, panel, x_window=(-6, 6)):
    """(compared, mismatch) between two products on test vectors, z- and x-exponents."""
    box = {"z": (-max(A.valuation, B.valuation), min(A.z_order, B.z_order) - 1), "x": tuple(x_window)}
    total = 0
    for w in panel:
        c, bad = compare_box(A.series(w), B.series(w), box, ("z", "x"))
        total += c
        if bad:
            return total, (w,) + bad
    return total, None


def normalization_check(a: Field, b: Field, p, phi: Associate, tilde: Associate, f: LaurentSeries,
                        z_order=4, panel=None, x_window=(-6, 6)) -> CheckReport:
    """Y_E^phi(a, z)b = Y_E^tilde(a, f(z))b with tilde(x, z) = phi(x, f^{-1}(z))."""
    space = a.space
    ws = list(panel or space.labels)
    left = y_phi_product(a, b, p, phi, z_order)
    right = y_phi_product(a, b, p, tilde, z_order)
    g = f.rename("z")
    box = {"z": (-left.valuation, z_order - 1), "x": tuple(x_window)}
    inputs = {"a": a.name, "b": b.name, "phi": phi.text(), "tilde": tilde.text()}
    total = 0
    for w in ws:
        lhs = left.series(w)
        rhs = compose(right.series(w), g, z_order)
        c, bad = compare_box(lhs, rhs, box, ("z", "x"))
        total += c
        if bad:
            return CheckReport.failed("normalization", inputs, box, bad[0], bad[1], bad[2], w=w)
    if total == 0:
        return CheckReport.insufficient("normalization", inputs, box)
    return CheckReport.passed("normalization", inputs, box, compared=total)


# ---------------------------------------------------------------------------
# the generated algebra


class FieldAlgebra:
    """A family of fields closed under phi-products up to a given depth.

    ``fields`` maps names to fields; ``basis`` lists the names kept after
    removing fields that are linear combinations of earlier ones on the
    probe coordinates.  Products of any two registered fields are computed
    on demand and registered under names such as "h_(-1)h".
    """

    def __init__(self, space: FockSpace, phi: Associate, z_order, size_cap=64, p_rule=least_compatible_p):
        self.space = space
        self.phi = phi
        self.z_order = z_order
        self.size_cap = size_cap
        self.p_rule = p_rule
        self.fields = {}
        self.basis = []
        self._products = {}
        self.add(identity_field(space))

    def add(self, f: Field):
        if f.name not in self.fields:
            if len(self.fields) >= self.size_cap:
                raise BasisExplosion(f"more than {self.size_cap} fields generated")
            self.fields[f.name] = f
        return f.name

    def product(self, a, b) -> PhiProduct:
        key = (a, b)
        pr = self._products.get(key)
        if pr is None:
            fa, fb = self.fields[a], self.fields[b]
            pr = PhiProduct(fa, fb, self.p_rule(fa, fb), self.phi, self.z_order)
            self._products[key] = pr
        return pr

    def Y(self, a, b) -> LaurentSeries:
        """Y_E(a, x)b as a series in x with Vector coefficients over field names."""
        pr = self.product(a, b)
        out = {}
        for k in range(pr.lowest(), self.z_order):
            f = pr.field(-k - 1)
            name = f.name
            if name not in self.fields:
                self.fields[name] = f
            out[k] = Vector.basis(name)
        return LaurentSeries(out, self.z_order, "x")

    def evaluate(self, vec, w) -> LaurentSeries:
        """The combination ``vec`` of fields applied to w."""
        total = None
        for name, c in as_vector(vec).items():
            term = self.fields[name](w) * c
            total = term if total is None else total + term
        return LaurentSeries.zero(var="x") if total is None else total

    def is_zero(self, name, panel=None):
        """A field is treated as zero when it vanishes on the probe coordinates."""
        return not self.probe(self.fields[name], panel)

    def probe(self, f: Field, panel=None):
        """Coordinates of f: x^e coefficients of f(w) landing in weight <= weight_cap.

        Needs f.degree; raises InsufficientPrecision when a coordinate is unknown.
        """
        ws = list(panel or self.space.labels)
        cap = self.space.weight_cap
        out = {}
        for w in ws:
            s = f(w)
            hi = cap - self.space.weight(w) - f.degree
            if s.order <= hi:
                raise InsufficientPrecision(f"{f.name}({w}) known only below x^{s.order}, need x^{hi}")
            for e, vec in s.items():
                if e > hi:
                    continue
                for lab, c in vec.items():
                    if self.space.weight(lab) <= cap:
                        out[(w, e, lab)] = c
        return out

    def vertex_structure(self, group) -> VertexStructure:
        """The registered fields as a vertex F-algebra; products register new names."""
        names = list(self.basis)
        space = StateSpace(names, name="fields")
        return VertexStructure(space, "1", lambda u, v: self.Y(u, v), group, self.z_order,
                               ("closure",), check=False)

    def module(self, V: VertexStructure) -> ModuleStructure:
        """W with Y_W(a, z) = a(z), coordinated by the associate."""
        M = ModuleStructure(V, self.space.state_space, lambda v, w: self.fields[v](w), "phi-quasi", self.phi,
                            provenance=("fields",))
        M.pp_floor = lambda u, w: self.fields[u].floor(w)
        return M


def _reduce(rows, vec):
    """Reduce a coordinate dict against echelon rows [(pivot, dict)]; returns the residue."""
    vec = dict(vec)
    for pivot, row in rows:
        c = vec.get(pivot)
        if c:
            for k, v in row.items():
                nv = vec.get(k, 0) - c * v
                if nv:
                    vec[k] = nv
                else:
                    vec.pop(k, None)
    return vec


def closure_generate(U, phi: Associate, depth=2, z_order=3, size_cap=64, n_range=None) -> FieldAlgebra:
    """Adjoin products a_(n) b for generators a in U and b in the family, ``depth`` rounds.

    Rounds start from U plus the identity field.  Within a round the order
    is by generator index, then n descending.  A product is kept when its
    probe coordinates are independent of the fields already kept (per
    degree), so the basis is a finite approximation of the generated space.
    """
    U = list(U)
    if not U:
        raise ValueError("need at least one generator")
    space = U[0].space
    A = FieldAlgebra(space, phi, z_order, size_cap)
    echelon = {}

    def keep(f):
        if f.degree is None:
            raise ValueError(f"field {f.name} has no degree")
        coords = A.probe(f)
        rows = echelon.setdefault(f.degree, [])
        res = _reduce(rows, coords)
        if not res:
            return False
        pivot = min(res, key=str)
        inv = 1 / res[pivot]
        row = {k: v * inv for k, v in res.items()}
        for i, (pv, r) in enumerate(rows):
            c = r.get(pivot)
            if c:
                rows[i] = (pv, {k: r.get(k, 0) - c * row.get(k, 0) for k in set(r) | set(row)
                                if r.get(k, 0) - c * row.get(k, 0)})
        rows.append((pivot, row))
        A.add(f)
        A.basis.append(f.name)
        return True

    keep(A.fields["1"])
    new = []
    for a in U:
        if keep(a):
            new.append(a.name)
    generators = [a.name for a in U]
    family = list(A.basis)
    for _ in range(depth):
        added = []
        for a in generators:
            for b in family:
                pr = A.product(a, b)
                ns = n_range if n_range is not None else range(-pr.lowest() - 1, -z_order - 1, -1)
                for n in ns:
                    f = pr.field(n)
                    try:
                        if keep(f):
                            added.append(f.name)
                    except PrecisionExhausted:
                        continue
        if not added:
            break
        family = added
    return A


def check_closure_assoc(A: FieldAlgebra, V: VertexStructure, u, v, w, panel=None, window=(-3, 2),
                        x_window=(-6, 6), l_max=4) -> CheckReport:
    """Weak F-associativity of the field algebra, with fields compared on test vectors.

    Both sides are formed with harness.assoc_sides on the named table and
    every field coefficient is then applied to the test vectors.
    """
    from .harness import assoc_sides

    box = {"x0": tuple(window), "x2": tuple(window), "x": tuple(x_window)}
    names = ("x0", "x2", "x")
    inputs = {"u": u, "v": v, "w": w, "group": V.group.name}
    lhs, rhs = assoc_sides(V, u, v, w, window[1] + 1)
    F = V.group
    ws = list(panel or A.space.labels[:3])
    total = 0
    used = 0
    for test in ws:
        ev = lambda vec: A.evaluate(vec, test)
        L = lhs.map(lambda row: row.map(ev))
        R = rhs.map(lambda row: row.map(ev))
        lm = LaurentSeries.constant(LaurentSeries.constant(1, "x0"), "x2")
        rm = LaurentSeries.constant(LaurentSeries.constant(1, "x2"), "x0")
        last = None
        for l in range(l_max + 1):
            if l:
                lm = lm * F.nested(("x0", "x2"))
                rm = rm * F.nested(("x2", "x0"))
            c, bad = compare_box(lm * L, rm * R, box, names)
            if bad is None:
                total += c
                used = max(used, l)
                break
            last = bad
        else:
            return CheckReport.failed("closure-assoc", inputs, box, last[0], last[1], last[2], test=test)
    if total == 0:
        return CheckReport.insufficient("closure-assoc", inputs, box)
    return CheckReport.passed("closure-assoc", inputs, box, used, compared=total, panel=ws)


def heisenberg_commutator_check(space: FockSpace, window=5, panel=None) -> CheckReport:
    """[h_m, h_n] w = m delta_{m+n,0} w for modes with |m|, |n| <= window, on the panel."""
    ws = list(panel or space.labels)
    inputs = {"space": repr(space)}
    box = {"m": (-window, window), "n": (-window, window)}
    compared = 0
    for w, m, n in iproduct(ws, range(-window, window + 1), range(-window, window + 1)):
        try:
            hn = heisenberg_modes(space, n, w)
            left = Vector()
            for lab, c in hn.items():
                left = left + heisenberg_modes(space, m, lab) * c
            hm = heisenberg_modes(space, m, w)
            right = Vector()
            for lab, c in hm.items():
                right = right + heisenberg_modes(space, n, lab) * c
        except OverflowBeyondCap:
            continue
        want = Vector.basis(w) * (m if m + n == 0 else 0)
        compared += 1
        if left - right != want:
            return CheckReport.failed("heisenberg-bracket", inputs, box, (m, n), left - right, want, w=w)
    return CheckReport.passed("heisenberg-bracket", inputs, box, compared=compared)


def heisenberg_example(weight_cap=3, modes=6):
    space = FockSpace(weight_cap, modes)
    return space, heisenberg(space)
