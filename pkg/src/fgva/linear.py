"""Sparse exact vectors over Q and a little linear algebra on them."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class Vector:
    """Finite linear combination of basis labels with rational coefficients.

    Labels are any hashable, sortable objects (basis names such as ``"t^2"``).

    >>> Vector({"a": 1}) + 2 * Vector({"b": 1})
    Vector({'a': 1, 'b': 2})
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for k, v in dict(coeffs).items():
                v = Fraction(v)
                if v:
                    c[k] = v
        self._c = c

    @classmethod
    def basis(cls, label):
        return cls({label: 1})

    @classmethod
    def _raw(cls, c):
        v = cls.__new__(cls)
        v._c = c
        return v

    def items(self):
        return sorted(self._c.items(), key=lambda kv: _sort_key(kv[0]))

    def labels(self):
        return [k for k, _ in self.items()]

    def __getitem__(self, label):
        return self._c.get(label, Fraction(0))

    def __iter__(self):
        return iter(self.items())

    def __len__(self):
        return len(self._c)

    def as_dict(self):
        return dict(self._c)

    def is_exact_zero(self):
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if isinstance(other, Vector):
            return self._c == other._c
        if isinstance(other, (int, Rational)) and other == 0:
            return not self._c
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __add__(self, other):
        if isinstance(other, (int, Rational)) and other == 0:
            return self
        if not isinstance(other, Vector):
            return NotImplemented
        c = dict(self._c)
        for k, v in other._c.items():
            s = c.get(k, 0) + v
            if s:
                c[k] = s
            else:
                c.pop(k, None)
        return Vector._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return Vector._raw({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Rational)) and other == 0:
            return self
        if not isinstance(other, Vector):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, s):
        if isinstance(s, (int, Rational)):
            s = Fraction(s)
            if not s:
                return Vector._raw({})
            return Vector._raw({k: v * s for k, v in self._c.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1 / Fraction(s))

    def __repr__(self):
        body = ", ".join(f"{k!r}: {_fmt(v)}" for k, v in self.items())
        return f"Vector({{{body}}})"

    def __str__(self):
        from .literals import format_rational

        if not self._c:
            return "0"
        parts = []
        for k, v in self.items():
            if v == 1:
                parts.append(f"{k}")
            elif v == -1:
                parts.append(f"-{k}")
            else:
                parts.append(f"{format_rational(v)}*{k}")
        return " + ".join(parts).replace("+ -", "- ")


def _fmt(v):
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _sort_key(label):
    return (type(label).__name__, label) if not isinstance(label, tuple) else ("tuple", label)


def apply_matrix(matrix, v: Vector) -> Vector:
    """Apply a linear map given as ``{label: Vector}`` (images of basis vectors)."""
    out = Vector()
    for k, c in v._c.items():
        out = out + c * matrix[k]
    return out


def row_reduce(vectors):
    """Reduced echelon basis of the span of ``vectors`` as (pivot, Vector) pairs."""
    rows = []
    for v in vectors:
        for pivot, r in rows:
            if v[pivot]:
                v = v - v[pivot] * r
        if v:
            pivot = v.labels()[0]
            v = v / v[pivot]
            rows = [(p, r - r[pivot] * v if r[pivot] else r) for p, r in rows]
            rows.append((pivot, v))
    return rows


def in_span(v: Vector, reduced) -> bool:
    for pivot, r in reduced:
        if v[pivot]:
            v = v - v[pivot] * r
    return not v
