"""Command-line front end: ``fgva <group> <command> [flags]``.

Every command prints either values (series, tables) or check reports.  With
``--json`` each output item is one JSON object per line.  Exit codes: 0 when
every report passes, 1 when any fails, 2 on insufficient precision or a
domain error, 64 on malformed flags or literals.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .associate import (Associate, assoc_check, assoc_from_p, assoc_transform, nonvanishing_probe,
                        phi_from_literal)
from .errors import FGVAError, LiteralError
from .fields import FockSpace, check_closure_assoc, closure_generate, compatibility_check, heisenberg
from .formal_group import ALIASES, fg_check, fg_conjugate, fg_from_log, fg_log, parse_group
from .harness import (check_D_definition, check_F_assoc_alt, check_g_locality_equiv, check_jacobi_F,
                      check_weak_assoc, check_weak_comm)
from .literals import format_series, parse_series
from .report import FAIL, INSUFFICIENT, CheckReport, aggregate
from .suites import DEFAULT_SEED, run_suite
from .vertex import borcherds_build, builtin_examples, change_variables, d_operator, vseries_json, vseries_text
from .zhu import adjoint_module, check_module, t_grading, xw_map, zhu_transform

EXIT_PASS, EXIT_FAIL, EXIT_ERROR, EXIT_USAGE = 0, 1, 2, 64
DEFAULT_ORDER = 8
DEFAULT_WINDOW = (-6, 6)
DEFAULT_MAX = 8

# coordinate names that are not series literals
NAMED_ASSOCIATES = {
    "x*e^z": ("additive", "x"),
    "x*(1+z)": ("multiplicative", "x"),
    "x+z": ("additive", "1"),
    "x": ("additive", "0"),
}

DEFAULT_PAIRS = {"poly_t": ("t", "t", "1"), "upper_triangular": ("E12", "E22", "1")}


class UsageError(Exception):
    """Malformed flags or literals."""


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# flag types


def _interval(text):
    try:
        a, b = (int(s) for s in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}") from None
    if a > b:
        raise argparse.ArgumentTypeError(f"empty window {text!r}")
    return (a, b)


def window_arg(text):
    """``a:b`` for one range, ``a:b,a:b,a:b`` for a box with one range per variable."""
    parts = [_interval(p) for p in text.split(",")]
    return parts[0] if len(parts) == 1 else parts


def positive(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n <= 0:
        raise argparse.ArgumentTypeError("precision values must be positive")
    return n


def nonnegative(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("expected a nonnegative integer")
    return n


def default_order():
    text = os.environ.get("FGVA_DEFAULT_ORDER")
    if text is None:
        return DEFAULT_ORDER
    try:
        return positive(text)
    except argparse.ArgumentTypeError as e:
        raise UsageError(f"FGVA_DEFAULT_ORDER: {e}") from None


def _labels(text):
    return [s.strip() for s in text.split(",") if s.strip()]


# ---------------------------------------------------------------------------
# output


class Output:
    """Collects reports and prints values and reports in text or JSON form."""

    def __init__(self, as_json, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout
        self.reports = []

    def value(self, kind, text, data=None):
        if self.as_json:
            record = {"kind": kind, "text": text}
            if data is not None:
                record["data"] = data
            print(json.dumps(record, sort_keys=True), file=self.stream)
        else:
            print(text, file=self.stream)

    def report(self, r: CheckReport):
        self.reports.append(r)
        print(r.json_line() if self.as_json else r.text(), file=self.stream)

    def exit_code(self):
        verdict = aggregate(self.reports) if self.reports else "pass"
        return {FAIL: EXIT_FAIL, INSUFFICIENT: EXIT_ERROR}.get(verdict, EXIT_PASS)


# ---------------------------------------------------------------------------
# shared builders


def _series(text, var="x"):
    return parse_series(text, var)


def _group(text, order=None):
    try:
        return parse_group(text, order)
    except ValueError as e:
        if isinstance(e, FGVAError) and not isinstance(e, LiteralError):
            raise
        raise LiteralError(str(e)) from None


def build_associate(args, text=None, group=None):
    """An associate from a named coordinate, or from --p, or from a literal in x and z."""
    z_order = args.z_order or args.order
    text = text if text is not None else getattr(args, "phi", None)
    if text is not None and text.replace(" ", "") in NAMED_ASSOCIATES:
        gname, p = NAMED_ASSOCIATES[text.replace(" ", "")]
        return assoc_from_p(_group(gname), _series(p), z_order)
    F = group or _group(args.group)
    if text is None:
        p = getattr(args, "p", None)
        if p is None:
            raise UsageError("give --phi or --p")
        return assoc_from_p(F, _series(p), z_order)
    return Associate(phi_from_literal(text, z_order), F)


EXAMPLES = ("poly_t", "upper_triangular")


def _example(args):
    if args.example not in EXAMPLES:
        raise UsageError(f"unknown example {args.example!r}; choose from {', '.join(EXAMPLES)}")
    return builtin_examples(args.example, args.cap)


def build_structure(args):
    F = _group(args.group)
    A = _example(args)
    # over the additive law the construction is exact unless an order is asked for
    exact = F.poly == _group("additive").poly and not args.order_given
    return borcherds_build(A, F, None if exact else args.order)


def _emit_table(out, V, labels, kind="table"):
    for u in labels:
        for v in labels:
            try:
                s = V.Y(u, v)
            except FGVAError:
                continue
            out.value(kind, f"Y({u}, x){v} = {vseries_text(s)}", {"u": u, "v": v, "series": vseries_json(s)})


# ---------------------------------------------------------------------------
# commands: formal groups


def cmd_fg_log(args, out):
    F = _group(args.group)
    f = fg_log(F, args.order)
    out.value("series", format_series(f))


def cmd_fg_from_log(args, out):
    F = fg_from_log(_series(args.f), args.order)
    out.value("group", F.text())


def cmd_fg_conjugate(args, out):
    F = fg_conjugate(_group(args.group), _series(args.g), args.order)
    out.value("group", F.text())


def cmd_fg_check(args, out):
    F = _group(args.group) if args.group in ALIASES else args.group
    out.report(fg_check(F, args.order))


# ---------------------------------------------------------------------------
# commands: associates


def cmd_assoc_from_p(args, out):
    F = _group(args.group)
    a = assoc_from_p(F, _series(args.p), args.z_order or args.order, args.x_window)
    out.value("associate", a.text())


def cmd_assoc_check(args, out):
    F = _group(args.group)
    out.report(assoc_check(phi_from_literal(args.phi, args.z_order or args.order), F))


def cmd_assoc_transform(args, out):
    a = build_associate(args)
    if args.kind == "bar":
        result = assoc_transform(a, kind="bar", group=_group(args.target))
    else:
        if args.g is None:
            raise UsageError(f"--kind {args.kind} needs --g")
        result = assoc_transform(a, _series(args.g), args.kind)
    out.value("associate", f"{result.text()} over {result.group.name}")


def cmd_assoc_probe(args, out):
    a = build_associate(args)
    out.report(nonvanishing_probe(args.q, a, args.probe_window))


# ---------------------------------------------------------------------------
# commands: vertex structures


def _table_labels(args, V):
    return _labels(args.labels) if args.labels else list(V.labels[:3])


def cmd_va_build(args, out):
    V = build_structure(args)
    _emit_table(out, V, _table_labels(args, V))


def cmd_va_change_vars(args, out):
    V = build_structure(args)
    W = change_variables(V, _series(args.g), args.order)
    _emit_table(out, W, _table_labels(args, W))


def cmd_va_d_operator(args, out):
    V = build_structure(args)
    for v, vec in d_operator(V).items():
        out.value("d-operator", f"D {v} = {vec}", {"v": v, "image": {k: str(c) for k, c in vec.items()}})


# ---------------------------------------------------------------------------
# commands: axiom checks


def cmd_check(args, out):
    V = build_structure(args)
    du, dv, dw = DEFAULT_PAIRS.get(args.example, ("t", "t", "1"))
    u, v, w = args.u or du, args.v or dv, args.w or dw
    window = args.window
    panel = _labels(args.panel) if args.panel else None
    name = args.check
    if name == "weak-assoc":
        r = check_weak_assoc(V, u, v, w, args.l_max, window)
    elif name == "weak-comm":
        r = check_weak_comm(V, u, v, args.k_max, window, panel)
    elif name == "f-assoc-alt":
        r = check_F_assoc_alt(V, u, v, args.k_max, window, panel)
    elif name == "jacobi":
        r = check_jacobi_F(V, u, v, w, window if args.window_given else (-5, 5))
    elif name == "d-def":
        r = check_D_definition(V, d_operator(V), window, panel, args.k_max)
    else:
        if args.g is None:
            raise UsageError("g-equiv needs --g")
        r = check_g_locality_equiv(V.field(u), V.field(v), _series(args.g), args.k, window,
                                   panel or ["1", u], V.labels, args.order)
    out.report(r)


# ---------------------------------------------------------------------------
# commands: Zhu transform and x e^z modules


def _poly_t_grading(args, V):
    return t_grading(V.labels, -1 if args.deg == "neg" else 1)


def cmd_zhu_transform(args, out):
    V = borcherds_build(_example(args), _group("additive"))
    Z = zhu_transform(V, _poly_t_grading(args, V), args.order)
    _emit_table(out, Z, _table_labels(args, Z))


def cmd_zhu_xw(args, out):
    V = borcherds_build(_example(args), _group("additive"))
    X = xw_map(adjoint_module(V), _poly_t_grading(args, V), args.order)
    out.value("associate", f"phi = {X.phi.text()}")
    lo, hi = args.window if isinstance(args.window, tuple) else args.window[0]
    for v in _table_labels(args, V):
        for w in _table_labels(args, V):
            s = X.Y(v, w)
            kept = {e: c for e, c in s.items() if lo <= e <= hi}
            text = " + ".join(f"({c})*x^{e}" for e, c in kept.items()) or "0"
            out.value("module", f"X({v}, x){w} = {text} on x^{lo}..x^{hi}",
                      {"v": v, "w": w, "series": [{"exp": e, "vector": {k: str(q) for k, q in c.items()}}
                                                  for e, c in kept.items()]})


def cmd_zhu_check(args, out):
    V = borcherds_build(_example(args), _group("additive"))
    M = adjoint_module(V)
    if args.variant.startswith("phi"):
        M = xw_map(M, _poly_t_grading(args, V), args.order)
    params = {"l_max": args.l_max}
    if args.q is not None:
        params["q"] = args.q
    if args.phi is not None:
        params["phi"] = build_associate(args, args.phi)
    if args.variant in ("quasi", "phi-quasi") and args.q is None:
        raise UsageError(f"--variant {args.variant} needs --q")
    window = args.window if isinstance(args.window, tuple) else args.window[0]
    panel = _labels(args.panel) if args.panel else ["1", "t"]
    vectors = _labels(args.vectors) if args.vectors else ["1", "t"]
    out.report(check_module(M, args.variant, params, window, panel, vectors, args.k_max))


# ---------------------------------------------------------------------------
# commands: fields


def cmd_fields_closure(args, out):
    if args.example != "heisenberg":
        raise UsageError("the only field example is heisenberg")
    space = FockSpace(args.weight_cap, args.mode_window)
    h = heisenberg(space)
    phi = build_associate(args, args.phi, group=_group("additive"))
    A = closure_generate([h], phi, depth=args.depth, z_order=args.z_order, size_cap=args.size_cap)
    out.value("closure", f"basis ({len(A.basis)} fields, depth {args.depth}): " + ", ".join(A.basis),
              {"basis": A.basis, "depth": args.depth, "z_order": args.z_order})
    for b in A.basis:
        s = A.Y("h", b)
        out.value("table", f"Y(h, x){b} = {vseries_text(s)}", {"u": "h", "v": b, "series": vseries_json(s)})
    if args.check:
        out.report(compatibility_check(h, h, "x1^2-2*x1*x2+x2^2", phi))
        V = A.vertex_structure(phi.group)
        for triple in (("h", "h", "1"), ("h", "1", "h"), ("h", "h", "h")):
            out.report(check_closure_assoc(A, V, *triple))


# ---------------------------------------------------------------------------
# commands: suites


def cmd_suite(args, out):
    # --order counts from the base precisions of the batteries (6 for the associate tables)
    bump = max(0, args.order - 6) if args.order_given else 0
    for battery in run_suite(args.name, bump=bump, seed=args.seed):
        for r in battery.reports:
            r.inputs.setdefault("battery", battery.name)
            out.report(r)


# ---------------------------------------------------------------------------
# parser


def _common(order):
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--order", type=positive, default=None, help=f"truncation order (default {order})")
    p.add_argument("--z-order", type=positive, default=None)
    p.add_argument("--x-window", type=_interval, default=None)
    p.add_argument("--window", type=window_arg, default=None)
    p.add_argument("--l-max", type=nonnegative, default=DEFAULT_MAX)
    p.add_argument("--k-max", type=nonnegative, default=DEFAULT_MAX)
    p.add_argument("--json", action="store_true", help="one JSON object per line")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--example", default=None, help="builtin example (poly_t, upper_triangular, heisenberg)")
    return p


def build_parser(order=DEFAULT_ORDER):
    common = _common(order)
    parser = Parser(prog="fgva", description="Exact formal groups, associates and vertex F-algebras.")
    groups = parser.add_subparsers(dest="area", required=True, parser_class=Parser)

    def command(sub, name, fn, **kw):
        p = sub.add_parser(name, parents=[common], **kw)
        p.set_defaults(fn=fn)
        return p

    fg = groups.add_parser("fg", help="formal group laws").add_subparsers(dest="cmd", required=True,
                                                                          parser_class=Parser)
    p = command(fg, "log", cmd_fg_log)
    p.add_argument("--group", required=True)
    p = command(fg, "from-log", cmd_fg_from_log)
    p.add_argument("--f", required=True)
    p = command(fg, "conjugate", cmd_fg_conjugate)
    p.add_argument("--group", default="add")
    p.add_argument("--g", required=True)
    p = command(fg, "check", cmd_fg_check)
    p.add_argument("--group", required=True)

    assoc = groups.add_parser("assoc", help="associates").add_subparsers(dest="cmd", required=True,
                                                                        parser_class=Parser)
    p = command(assoc, "from-p", cmd_assoc_from_p)
    p.add_argument("--group", default="add")
    p.add_argument("--p", required=True)
    p = command(assoc, "check", cmd_assoc_check)
    p.add_argument("--group", default="add")
    p.add_argument("--phi", required=True)
    p = command(assoc, "transform", cmd_assoc_transform)
    p.add_argument("--kind", choices=("conjugate", "retime", "bar"), required=True)
    p.add_argument("--group", default="add")
    p.add_argument("--p")
    p.add_argument("--phi")
    p.add_argument("--g")
    p.add_argument("--target", default="mult")
    p = command(assoc, "probe", cmd_assoc_probe)
    p.add_argument("--q", required=True)
    p.add_argument("--group", default="add")
    p.add_argument("--p")
    p.add_argument("--phi")
    p.add_argument("--probe-window", type=positive, default=6)

    va = groups.add_parser("va", help="vertex F-algebras").add_subparsers(dest="cmd", required=True,
                                                                         parser_class=Parser)
    for name, fn in (("build", cmd_va_build), ("change-vars", cmd_va_change_vars), ("d-operator", cmd_va_d_operator)):
        p = command(va, name, fn)
        p.add_argument("--group", default="add")
        p.add_argument("--cap", type=positive, default=None)
        p.add_argument("--labels")
        if name == "change-vars":
            p.add_argument("--g", required=True)

    check = groups.add_parser("check", help="axiom checks").add_subparsers(dest="check", required=True,
                                                                          parser_class=Parser)
    for name in ("weak-assoc", "weak-comm", "f-assoc-alt", "jacobi", "d-def", "g-equiv"):
        p = command(check, name, cmd_check)
        p.add_argument("--group", default="add")
        p.add_argument("--cap", type=positive, default=None)
        p.add_argument("--u")
        p.add_argument("--v")
        p.add_argument("--w")
        p.add_argument("--panel")
        if name == "g-equiv":
            p.add_argument("--g")
            p.add_argument("--k", type=nonnegative, default=0)

    zhu = groups.add_parser("zhu", help="Zhu transform and x e^z modules").add_subparsers(
        dest="cmd", required=True, parser_class=Parser)
    for name, fn in (("transform", cmd_zhu_transform), ("xw", cmd_zhu_xw), ("check", cmd_zhu_check)):
        p = command(zhu, name, fn)
        p.add_argument("--deg", choices=("neg", "pos"), default="neg")
        p.add_argument("--cap", type=positive, default=None)
        p.add_argument("--labels")
        if name == "check":
            p.add_argument("--variant", choices=("module", "quasi", "phi", "phi-quasi"), default="phi")
            p.add_argument("--q")
            p.add_argument("--phi")
            p.add_argument("--group", default="add")
            p.add_argument("--panel")
            p.add_argument("--vectors")

    fields = groups.add_parser("fields", help="fields on the Fock space").add_subparsers(
        dest="cmd", required=True, parser_class=Parser)
    p = command(fields, "closure", cmd_fields_closure)
    p.add_argument("--phi", default="x*e^z")
    p.add_argument("--depth", type=nonnegative, default=2)
    p.add_argument("--weight-cap", type=nonnegative, default=3)
    p.add_argument("--mode-window", type=positive, default=6)
    p.add_argument("--size-cap", type=positive, default=64)
    p.add_argument("--check", action="store_true", help="also run compatibility and associativity checks")

    p = groups.add_parser("suite", parents=[common], help="acceptance batteries")
    p.add_argument("name", choices=("paper-tables", "axioms-all", "golden"))
    p.set_defaults(fn=cmd_suite)
    return parser


def _finish_defaults(args, order):
    args.order_given = args.order is not None
    args.window_given = args.window is not None
    if args.order is None:
        args.order = order
    if args.window is None:
        args.window = DEFAULT_WINDOW
    if args.example is None:
        args.example = "heisenberg" if args.area == "fields" else "poly_t"
    if args.area == "fields" and args.z_order is None:
        args.z_order = 3
    return args


WINDOW_FLAGS = ("--window", "--x-window")


def _attach_windows(argv):
    """Join ``--window -5:4`` into ``--window=-5:4`` so a negative range is not read as a flag."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in WINDOW_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None, stream=None):
    stream = stream or sys.stdout
    try:
        order = default_order()
        argv = sys.argv[1:] if argv is None else list(argv)
        args = _finish_defaults(build_parser(order).parse_args(_attach_windows(argv)), order)
        out = Output(args.json, stream)
        args.fn(args, out)
        return out.exit_code()
    except UsageError as e:
        print(f"fgva: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except LiteralError as e:
        print(f"fgva: bad literal: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FGVAError as e:
        print(f"fgva: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
