"""Concrete vertex F-algebras on finite-basis state spaces.

A vertex structure stores Y(u, x)v on basis pairs as Laurent series in x
whose coefficients are :class:`~fgva.linear.Vector` values.  Structures
built from an algebra with a derivation use the Borcherds rule
Y(a, x)b = (e^{f(x)D} a) b with f the logarithm of the formal group.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

from .errors import DomainViolation, OverflowBeyondCap, PrecisionExhausted
from .formal_group import FormalGroupLaw, canonical_group, fg_builtin, fg_conjugate, fg_log
from .linear import Vector
from .report import CheckReport
from .series import INF, LaurentSeries, compose, is_gseries, var_series


class StateSpace:
    """A finite basis with an optional integer grading."""

    def __init__(self, labels, grading=None, cap=None, name=None):
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be distinct")
        if grading is not None:
            missing = [b for b in self.labels if b not in grading]
            if missing:
                raise ValueError(f"grading misses {missing}")
            grading = {b: int(grading[b]) for b in self.labels}
        self.grading = grading
        self.cap = cap
        self.name = name

    @property
    def dim(self):
        return len(self.labels)

    def __contains__(self, label):
        return label in self.labels

    def __iter__(self):
        return iter(self.labels)

    def deg(self, label):
        if self.grading is None:
            raise DomainViolation("this space has no grading")
        return self.grading[label]

    def regraded(self, grading):
        return StateSpace(self.labels, grading, self.cap, self.name)


# ---------------------------------------------------------------------------
# vector-valued series


def as_vector(v):
    if isinstance(v, Vector):
        return v
    return Vector.basis(v)


def apply_field(field, s, var):
    """Apply a linear map label -> series (in x) to a vector or to every coefficient of a series.

    The new variable ``var`` becomes the innermost level of the result.
    """
    if isinstance(s, LaurentSeries):
        return s.map(lambda c: apply_field(field, c, var))
    vec = as_vector(s)
    total = None
    for label, c in vec.items():
        term = field(label).rename(var) * c
        total = term if total is None else total + term
    return LaurentSeries.zero(var=var) if total is None else total


def vseries_text(s):
    """Readable text of a vector-valued series in one variable."""
    parts = []
    for e, v in s.items():
        mono = "" if e == 0 else (f"*{s.var}" if e == 1 else f"*{s.var}^{e}")
        parts.append(f"({v}){mono}")
    body = " + ".join(parts) if parts else "0"
    return body if s.order == INF else f"{body} + O({s.var}^{s.order})"


def vseries_json(s):
    return [{"exp": e, "vector": {str(k): _rat(c) for k, c in v.items()}} for e, v in s.items()]


def _rat(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# algebras with a derivation


class DerivationAlgebra:
    """A finite-basis associative unital algebra with a derivation D.

    ``table[(a, b)]`` is the product of basis elements as a Vector; a pair
    absent from the table is a product that leaves the degree cap, and
    multiplying it raises :class:`OverflowBeyondCap`.
    """

    def __init__(self, labels, table, unit, D, name=None, cap=None):
        self.space = StateSpace(labels, cap=cap, name=name)
        self.table = {k: as_vector(v) for k, v in table.items()}
        self.unit = unit
        self.D = {b: as_vector(D.get(b, Vector())) for b in labels}
        self.name = name
        self.cap = cap
        self._validate()

    @property
    def labels(self):
        return self.space.labels

    def mul(self, a, b) -> Vector:
        a, b = as_vector(a), as_vector(b)
        out = Vector()
        for la, ca in a.items():
            for lb, cb in b.items():
                p = self.table.get((la, lb))
                if p is None:
                    raise OverflowBeyondCap(f"{la} * {lb} leaves the degree cap {self.cap}")
                out = out + p * (ca * cb)
        return out

    def derive(self, a, times=1) -> Vector:
        v = as_vector(a)
        for _ in range(times):
            out = Vector()
            for lab, c in v.items():
                out = out + self.D[lab] * c
            v = out
        return v

    def _validate(self):
        labels = self.labels
        for b in labels:
            if self.table.get((self.unit, b)) != Vector.basis(b) or self.table.get((b, self.unit)) != Vector.basis(b):
                raise DomainViolation(f"{self.unit} is not a unit on {b}")
        for a, b, c in iproduct(labels, repeat=3):
            try:
                left = self.mul(self.mul(a, b), c)
                right = self.mul(a, self.mul(b, c))
            except OverflowBeyondCap:
                continue
            if left != right:
                raise DomainViolation(f"multiplication is not associative on ({a}, {b}, {c})")
        for a, b in iproduct(labels, repeat=2):
            try:
                lhs = self.derive(self.mul(a, b))
                rhs = self.mul(self.derive(a), b) + self.mul(a, self.derive(b))
            except OverflowBeyondCap:
                continue
            if lhs != rhs:
                raise DomainViolation(f"D is not a derivation on ({a}, {b})")

    def is_commutative(self):
        return all(self.table.get((a, b)) == self.table.get((b, a)) for a, b in self.table)


def t_label(m, prefix=""):
    base = "1" if m == 0 else ("t" if m == 1 else f"t^{m}")
    if not prefix:
        return base
    return prefix if m == 0 else f"{prefix}*{base}"


def poly_t(cap=8) -> DerivationAlgebra:
    """Q[t] modulo degree cap+1 with D = d/dt."""
    labels = [t_label(m) for m in range(cap + 1)]
    table = {}
    for i, j in iproduct(range(cap + 1), repeat=2):
        if i + j <= cap:
            table[(t_label(i), t_label(j))] = Vector.basis(t_label(i + j))
    D = {t_label(m): Vector({t_label(m - 1): m}) for m in range(1, cap + 1)}
    return DerivationAlgebra(labels, table, "1", D, "poly_t", cap)


# 2x2 upper-triangular matrices spanned by 1 = E11 + E22, E12 and E22
_MATRIX_UNITS = ("", "E12", "E22")
_MATRIX_MUL = {
    ("", ""): "", ("", "E12"): "E12", ("", "E22"): "E22",
    ("E12", ""): "E12", ("E12", "E12"): None, ("E12", "E22"): "E12",
    ("E22", ""): "E22", ("E22", "E12"): None, ("E22", "E22"): "E22",
}


def upper_triangular(cap=4) -> DerivationAlgebra:
    """Upper-triangular 2x2 matrices over Q[t]/(t^(cap+1)) with entrywise d/dt.

    The basis is X*t^m for X in {1, E12, E22}; E12*E22 = E12 while
    E22*E12 = 0, so the algebra is noncommutative.
    """
    labels = [t_label(m, X) for X in _MATRIX_UNITS for m in range(cap + 1)]
    table = {}
    for (X, i), (Y, j) in iproduct(iproduct(_MATRIX_UNITS, range(cap + 1)), repeat=2):
        if i + j > cap:
            continue
        Z = _MATRIX_MUL[(X, Y)]
        table[(t_label(i, X), t_label(j, Y))] = Vector() if Z is None else Vector.basis(t_label(i + j, Z))
    D = {t_label(m, X): Vector({t_label(m - 1, X): m}) for X in _MATRIX_UNITS for m in range(1, cap + 1)}
    return DerivationAlgebra(labels, table, "1", D, "upper_triangular", cap)


def builtin_examples(name, cap=None) -> DerivationAlgebra:
    if name == "poly_t":
        return poly_t(8 if cap is None else cap)
    if name == "upper_triangular":
        return upper_triangular(4 if cap is None else cap)
    raise ValueError(f"unknown example {name!r}")


# ---------------------------------------------------------------------------
# vertex structures


def group_log(F: FormalGroupLaw, order):
    """The logarithm of F as a series in x; exact for the additive law."""
    if F == fg_builtin("additive"):
        return var_series("x")
    if order == INF:
        raise PrecisionExhausted(f"the logarithm of {F.name} needs a finite order")
    return fg_log(F, order)


class VertexStructure:
    """A state space with vacuum and Y-map on basis pairs, over a formal group.

    ``pair(u, v)`` returns Y(u, x)v for basis labels as a vector-valued
    series in x.  Results are cached; the vacuum and creation properties
    are checked on every basis vector at construction.
    """

    def __init__(self, space, vacuum, pair, group, order=INF, provenance=None, check=True):
        self.space = space
        self.vacuum = vacuum
        self._pair = pair
        self._cache = {}
        self.group = group
        self.order = order
        self.provenance = provenance or ("explicit",)
        if check:
            report = vacuum_check(self)
            if not report.ok:
                raise DomainViolation(f"vacuum/creation fails: {report.text()}")

    def __repr__(self):
        return f"VertexStructure({self.provenance[0]}, dim={self.space.dim}, group={self.group.name!r})"

    @property
    def labels(self):
        return self.space.labels

    def Y(self, u, v, var="x") -> LaurentSeries:
        """Y(u, var)v for basis labels u and v."""
        key = (u, v)
        s = self._cache.get(key)
        if s is None:
            s = self._pair(u, v)
            self._cache[key] = s
        return s if var == "x" else s.rename(var)

    def field(self, u):
        """Basis label -> Y(u, x)label, for use with :func:`apply_field`."""
        return lambda v: self.Y(u, v)

    def state_field(self, w):
        """Basis label u -> Y(u, x)w, the map v -> Y(v, x)w used on the right of associativity."""
        return lambda u: self.Y(u, w)

    def Yv(self, u, s, var="x"):
        """Y(u, var) applied to a vector or to every coefficient of a vector-valued series."""
        u = as_vector(u)
        total = None
        for lab, c in u.items():
            term = apply_field(self.field(lab), s, var) * c
            total = term if total is None else total + term
        return apply_field(lambda _: LaurentSeries.zero(), s, var) if total is None else total

    def pairs(self, labels=None):
        """Basis pairs whose product stays inside the degree cap."""
        labels = labels or self.labels
        for u, v in iproduct(labels, repeat=2):
            try:
                yield u, v, self.Y(u, v)
            except OverflowBeyondCap:
                continue

    def table_json(self, labels=None):
        return [{"u": u, "v": v, "series": vseries_json(s)} for u, v, s in self.pairs(labels)]


def vacuum_check(V: VertexStructure, labels=None) -> CheckReport:
    """Y(1, x)v = v, Y(v, x)1 has no negative powers and constant term v."""
    inputs = {"structure": V.provenance[0]}
    window = {"order": V.order}
    one = V.vacuum
    for v in labels or V.labels:
        s = V.Y(one, v)
        target = LaurentSeries.constant(Vector.basis(v))
        for e, c in (s - target).items():
            if c:
                return CheckReport.failed("vacuum", inputs, window, (e,), c, target.coefficient(e, Vector()),
                                          part="vacuum", v=v)
        try:
            s = V.Y(v, one)
        except OverflowBeyondCap:
            continue
        for e, c in s.items():
            if e < 0 and c:
                return CheckReport.failed("vacuum", inputs, window, (e,), c, Vector(), part="creation", v=v)
        if s.order <= 0:
            return CheckReport.insufficient("vacuum", inputs, window, part="creation", v=v)
        c0 = s.coefficient(0, Vector())
        if c0 != Vector.basis(v):
            return CheckReport.failed("vacuum", inputs, window, (0,), c0, Vector.basis(v), part="creation", v=v)
    return CheckReport.passed("vacuum", inputs, window)


def borcherds_build(A: DerivationAlgebra, F: FormalGroupLaw, order=None) -> VertexStructure:
    """Y_F(a, x)b = (e^{f(x)D} a) b with f the logarithm of F.

    Over the additive law with nilpotent D the result is exact; otherwise
    the tables are known modulo x^order.
    """
    additive = F == fg_builtin("additive")
    N = INF if additive and order is None else order
    if N is None:
        raise PrecisionExhausted(f"Borcherds construction over {F.name} needs an order")
    f = group_log(F, N)
    fpowers = [LaurentSeries.constant(1)]

    def fpow(k):
        while len(fpowers) <= k:
            fpowers.append((fpowers[-1] * f).truncate(N))
        return fpowers[k]

    def pair(a, b):
        total = LaurentSeries.zero(N)
        da = Vector.basis(a)
        k = 0
        fact = 1
        while da and k < N:
            if k:
                fact *= k
            prod = A.mul(da, b)
            if prod:
                total = total + fpow(k) * (prod * Fraction(1, fact))
            k += 1
            da = A.derive(da)
        return total

    return VertexStructure(A.space, A.unit, pair, F, N, ("borcherds", A.name, F.name))


def change_variables(V: VertexStructure, g: LaurentSeries, order=None) -> VertexStructure:
    """Y_g(v, x) = Y(v, g(x)), a structure over the conjugated group F_g."""
    if not is_gseries(g):
        raise DomainViolation("change of variables needs g(0) = 0 and g'(0) = 1")
    g = g.rename("x")
    if g.order == INF and g.coeffs == {1: 1}:
        return V
    N = min(V.order, g.order) if order is None else min(order, V.order, g.order)
    if N == INF:
        raise PrecisionExhausted("change of variables by an exact series needs an order")
    group = canonical_group(fg_conjugate(V.group, g.truncate(N) if g.order != INF else g, N))

    def pair(u, v):
        return compose(V.Y(u, v).truncate(N), g, N)

    return VertexStructure(V.space, V.vacuum, pair, group, N, ("transformed", V.provenance, str(g)))


def d_operator(V: VertexStructure):
    """The operator Dv = v_{-2}1, i.e. the x^1 coefficient of Y(v, x)1, as label -> Vector."""
    out = {}
    for v in V.labels:
        try:
            s = V.Y(v, V.vacuum)
        except OverflowBeyondCap:
            continue
        if s.order <= 1:
            raise PrecisionExhausted("the x^1 coefficient of Y(v, x)1 is not known")
        out[v] = s.coefficient(1, Vector())
    return out


def apply_linear(matrix, v) -> Vector:
    """Apply a label -> Vector map to a vector."""
    out = Vector()
    for lab, c in as_vector(v).items():
        out = out + matrix.get(lab, Vector()) * c
    return out


def apply_linear_series(matrix, s):
    return s.map(lambda c: apply_linear(matrix, c) if isinstance(c, Vector) else apply_linear_series(matrix, c))
