"""Structured verdicts shared by every check, with a JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

from .linear import Vector
from .series import lookup

PASS = "pass"
FAIL = "fail"
INSUFFICIENT = "insufficient-precision"
VERDICTS = (PASS, FAIL, INSUFFICIENT)


def _rat(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _jsonable(v):
    if isinstance(v, Fraction):
        return _rat(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and v == float("inf"):
        return None
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return str(v)


@dataclass
class Witness:
    exponents: tuple
    lhs: Fraction
    rhs: Fraction
    component: object = None

    def to_json(self):
        d = {"exponents": list(self.exponents), "lhs": _rat(self.lhs), "rhs": _rat(self.rhs)}
        if self.component is not None:
            d["component"] = str(self.component)
        return d


@dataclass
class CheckReport:
    """Outcome of one check: verdict, the window used and a witness on failure."""

    check: str
    inputs: dict
    window: dict
    verdict: str
    witness: Witness | None = None
    multiplier: int | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAIL and self.witness is None and not self.details.get("note"):
            raise ValueError("a failing report needs a witness")

    @property
    def ok(self):
        return self.verdict == PASS

    @classmethod
    def passed(cls, check, inputs, window, multiplier=None, **details):
        return cls(check, inputs, window, PASS, None, multiplier, details)

    @classmethod
    def failed(cls, check, inputs, window, exponents, lhs, rhs, multiplier=None, **details):
        return cls(check, inputs, window, FAIL, make_witness(exponents, lhs, rhs), multiplier, details)

    @classmethod
    def insufficient(cls, check, inputs, window, **details):
        return cls(check, inputs, window, INSUFFICIENT, None, None, details)

    def to_json(self):
        return {
            "check": self.check,
            "inputs": _jsonable(self.inputs),
            "window": _jsonable(self.window),
            "verdict": self.verdict,
            "multiplier": self.multiplier,
            "witness": None if self.witness is None else self.witness.to_json(),
        }

    def json_line(self):
        return json.dumps(self.to_json(), sort_keys=True)

    def text(self):
        line = f"{self.check}: {self.verdict}"
        if self.multiplier is not None:
            line += f" (multiplier {self.multiplier})"
        if self.witness is not None:
            w = self.witness
            comp = f" [{w.component}]" if w.component is not None else ""
            line += f" witness {list(w.exponents)}{comp}: lhs {_rat(w.lhs)} rhs {_rat(w.rhs)}"
        return line

    def __str__(self):
        return self.text()


def make_witness(exponents, lhs, rhs):
    """Witness from two differing coefficients, which may be vectors."""
    if isinstance(lhs, Vector) or isinstance(rhs, Vector):
        lv = lhs if isinstance(lhs, Vector) else Vector()
        rv = rhs if isinstance(rhs, Vector) else Vector()
        for label, _ in (lv - rv).items():
            return Witness(tuple(exponents), lv[label], rv[label], label)
    dl = getattr(lhs, "first_difference", None)
    if dl is not None:
        comp, a, b = lhs.first_difference(rhs)
        return Witness(tuple(exponents), a, b, comp)
    return Witness(tuple(exponents), Fraction(lhs), Fraction(rhs))


def aggregate(reports):
    """Combined verdict: any fail wins, then any insufficient, else pass."""
    verdicts = [r.verdict for r in reports]
    if FAIL in verdicts:
        return FAIL
    if INSUFFICIENT in verdicts:
        return INSUFFICIENT
    return PASS


def compare_box(lhs, rhs, box, names=None, known=None):
    """Compare two nested series coefficient-wise on a box of named exponents.

    Returns ``(compared, mismatch)``.  Only exponents known on both sides are
    compared; ``known`` can veto further exponents (e.g. a total-degree cap).
    """
    names = list(names or box)
    ranges = [range(box[n][0], box[n][1] + 1) for n in names]
    compared = 0
    for exps in iproduct(*ranges):
        e = dict(zip(names, exps))
        if known is not None and not known(e):
            continue
        k1, a = lookup(lhs, e)
        if not k1:
            continue
        k2, b = lookup(rhs, e)
        if not k2:
            continue
        compared += 1
        if bool(a - b):
            return compared, (exps, a, b)
    return compared, None


def verdict_from_compare(check, inputs, box, compared, mismatch, multiplier=None, **details):
    if mismatch is not None:
        return CheckReport.failed(check, inputs, box, mismatch[0], mismatch[1], mismatch[2],
                                  multiplier, compared=compared, **details)
    if compared == 0:
        return CheckReport.insufficient(check, inputs, box, compared=0, **details)
    return CheckReport.passed(check, inputs, box, multiplier, compared=compared, **details)


def compare_support(lhs, rhs, names, known=None, key=None):
    """Compare two nested series on the union of their stored exponents.

    Returns ``(compared, mismatch)`` like :func:`compare_box`; exponents are
    reported in the order of ``names`` and visited in order of ``key``
    (default: total degree, then lexicographic).
    """
    from .literals import flatten

    lt, _ = flatten(lhs, names) if hasattr(lhs, "coeffs") else ({(0,) * len(names): lhs}, names)
    rt, _ = flatten(rhs, names) if hasattr(rhs, "coeffs") else ({(0,) * len(names): rhs}, names)
    keys = sorted(set(lt) | set(rt), key=key or (lambda k: (sum(abs(e) for e in k), k)))
    compared = 0
    for exps in keys:
        e = dict(zip(names, exps))
        if known is not None and not known(e):
            continue
        k1, a = lookup(lhs, e)
        k2, b = lookup(rhs, e)
        if not (k1 and k2):
            continue
        compared += 1
        if bool(a - b):
            return compared, (exps, a, b)
    return compared, None
