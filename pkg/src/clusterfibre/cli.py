"""Command-line front end.

Subcommands: ``picture`` (the cluster tree), ``invariants`` (the per-cluster
table, both normalizations), ``fibre`` (the assembled special fibre), and
``selfcheck`` (the cross-validation suites on a built-in corpus and, when
given, on the user input).  Polynomials are written in x (and th for the
unramified generator when the degree is larger than one), with integer or
rational literals and the operators + - * ^.

Exit status: 0 on success, 1 on input errors, 2 on internal-consistency
failures, which indicate a bug rather than bad input.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from .field import BaseField, KPoly, NotSeparable
from .rationals import qstr
from .clusters import (build_cluster_tree, InternalInconsistency,
                       ResidueModeOverflow, cluster_chain)
from .invariants import all_records
from .fibre import (assemble, export, fibre_graph, graphs_isomorphic,
                    farey_chain, poly_str)


class PolySyntaxError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# ---------------------------------------------------------------------------
# Polynomial expressions


class _Tokens:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else None

    def take(self):
        c = self.peek()
        self.pos += 1
        return c

    def expect(self, c):
        got = self.peek()
        if got != c:
            raise PolySyntaxError(f"expected {c!r}", self.pos)
        self.pos += 1

    def number(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise PolySyntaxError("expected a number", start)
        value = int(self.text[start:self.pos])
        # rational literal a/b
        save = self.pos
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == "/":
            self.pos += 1
            self.skip_ws()
            dstart = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == dstart:
                raise PolySyntaxError("expected a denominator", dstart)
            return Fraction(value, int(self.text[dstart:self.pos]))
        self.pos = save
        return Fraction(value)


def parse_poly(text: str, K: BaseField) -> KPoly:
    """Parse an expression in x (and th when the field has a generator)."""
    toks = _Tokens(text)
    poly = _parse_sum(toks, K)
    toks.skip_ws()
    if toks.pos != len(text):
        raise PolySyntaxError("trailing input", toks.pos)
    return poly


def _parse_sum(toks, K):
    sign = 1
    if toks.peek() == "-":
        toks.take()
        sign = -1
    elif toks.peek() == "+":
        toks.take()
    acc = _parse_product(toks, K)
    if sign < 0:
        acc = -acc
    while True:
        c = toks.peek()
        if c == "+":
            toks.take()
            acc = acc + _parse_product(toks, K)
        elif c == "-":
            toks.take()
            acc = acc - _parse_product(toks, K)
        else:
            return acc


def _parse_product(toks, K):
    acc = _parse_power(toks, K)
    while toks.peek() == "*":
        toks.take()
        acc = acc * _parse_power(toks, K)
    return acc


def _parse_power(toks, K):
    base = _parse_atom(toks, K)
    if toks.peek() == "^":
        toks.take()
        toks.skip_ws()
        neg = False
        if toks.peek() == "-":
            raise PolySyntaxError("negative exponents are not allowed", toks.pos)
        n = toks.number()
        if n.denominator != 1:
            raise PolySyntaxError("exponents must be integers", toks.pos)
        return base ** int(n)
    return base


def _parse_atom(toks, K):
    c = toks.peek()
    if c is None:
        raise PolySyntaxError("unexpected end of input", toks.pos)
    if c == "(":
        toks.take()
        inner = _parse_sum(toks, K)
        toks.expect(")")
        return inner
    if c == "x":
        toks.take()
        return K.x()
    if c == "t":
        # accept 'th' or 'theta'
        start = toks.pos
        word = ""
        while toks.pos < len(toks.text) and toks.text[toks.pos].isalpha():
            word += toks.text[toks.pos]
            toks.pos += 1
        if word not in ("th", "theta"):
            raise PolySyntaxError(f"unknown symbol {word!r}", start)
        if K.m == 1:
            raise PolySyntaxError("theta needs an unramified degree > 1", start)
        return K.poly([K.theta])
    if c.isdigit():
        return K.poly([toks.number()])
    raise PolySyntaxError(f"unexpected character {c!r}", toks.pos)


# ---------------------------------------------------------------------------
# Commands


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="clusterfibre",
        description="Cluster pictures and special fibres of hyperelliptic "
                    "curves y^2 = f(x) over p-adic fields")
    ap.add_argument("command", choices=["picture", "invariants", "fibre", "selfcheck"])
    ap.add_argument("expression", nargs="?", help="polynomial in x (and th)")
    ap.add_argument("--prime", "-p", type=int, help="odd residue characteristic")
    ap.add_argument("--unramified-degree", "-m", type=int, default=1)
    ap.add_argument("--coeffs", help="comma-separated coefficients c0,c1,...")
    ap.add_argument("--residue-mode", choices=["exact", "geometric"], default="exact")
    ap.add_argument("--format", choices=["json", "ascii", "dot", "tikz"], default="ascii")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--extension-budget", type=int, default=64)
    return ap


def _input_poly(args, K):
    if args.coeffs:
        try:
            coeffs = [Fraction(c.strip()) for c in args.coeffs.split(",")]
        except (ValueError, ZeroDivisionError) as ex:
            raise PolySyntaxError(f"bad coefficient list: {ex}", 0)
        return K.poly(coeffs)
    if not args.expression:
        raise PolySyntaxError("no polynomial given", 0)
    return parse_poly(args.expression, K)


def _render_picture(tree, fmt):
    if fmt == "json":
        fib_like = {
            "base_field": {"p": tree.field.p, "m": tree.field.m},
            "normalization_shift": tree.shift,
            "mode": "geometric" if tree.mode == "geometric" else "arithmetic",
            "clusters": _cluster_dicts(tree),
        }
        import json as _json
        return _json.dumps(fib_like, sort_keys=True, indent=1) + "\n"
    if fmt == "tikz":
        return _render_tikz(tree)
    lines = [f"cluster picture over Q_{tree.field.p}"
             + (f"(theta, degree {tree.field.m})" if tree.field.m > 1 else "")
             + (f", x scaled by p^{tree.shift}" if tree.shift else "")]
    if tree.root is None:
        lines.append("  single orbit, no proper clusters")
        return "\n".join(lines) + "\n"

    def walk(node, depth):
        pad = "  " * (depth + 1)
        lines.append(f"{pad}cluster #{node.id}: degree={node.degree} "
                     f"radius={qstr(node.radius)} size={node.size} "
                     f"centre={poly_str(node.centre)}"
                     + (" degree-minimal" if node.is_degree_minimal else ""))
        for leaf in node.leaves:
            lines.append(f"{pad}  orbit: degree={leaf.degree} ({leaf.certificate})")
        for c in node.children:
            walk(c, depth + 1)

    walk(tree.root, 0)
    return "\n".join(lines) + "\n"


def _cluster_dicts(tree):
    out = []
    for node in tree.nodes:
        out.append({
            "id": node.id, "degree": node.degree, "radius": qstr(node.radius),
            "size": node.size, "centre": poly_str(node.centre),
            "parent": node.parent.id if node.parent else None,
            "proper": True, "degree_minimal": node.is_degree_minimal,
        })
        for leaf in node.leaves:
            out.append({"id": None, "degree": leaf.degree, "radius": "inf",
                        "size": leaf.degree, "parent": node.id, "proper": False,
                        "centre": poly_str(leaf.poly) if leaf.poly else None,
                        "degree_minimal": False})
    return out


def _render_tikz(tree):
    """Best-effort nested sketch of the cluster picture."""
    lines = ["\\begin{tikzpicture}"]
    y = [0.0]

    def walk(node, x):
        y0 = y[0]
        label = f"deg {node.degree}, radius {qstr(node.radius)}"
        for leaf in node.leaves:
            lines.append(f"  \\fill ({x + 0.4:.1f},{y[0]:.1f}) circle (1.5pt) "
                         f"node[right] {{orbit {leaf.degree}}};")
            y[0] -= 0.5
        for c in node.children:
            walk(c, x + 0.8)
        y1 = y[0] + 0.5
        mid = (y0 + y1) / 2
        lines.append(f"  \\draw ({x:.1f},{mid:.1f}) ellipse "
                     f"({0.6 + 0.3 * _height(node):.1f} and {max(0.4, (y0 - y1) / 2 + 0.4):.1f});")
        lines.append(f"  \\node[left] at ({x - 0.7:.1f},{mid:.1f}) {{{label}}};")

    if tree.root is not None:
        walk(tree.root, 0.0)
    lines.append("\\end{tikzpicture}")
    return "\n".join(lines) + "\n"


def _height(node):
    if not node.children:
        return 0
    return 1 + max(_height(c) for c in node.children)


def _render_invariants(tree, records, fmt):
    if fmt == "json":
        import json as _json
        payload = {
            "base_field": {"p": tree.field.p, "m": tree.field.m},
            "normalization_shift": tree.shift,
            "clusters": [],
        }
        for node in tree.nodes:
            payload["clusters"].append({
                "id": node.id, "degree": node.degree, "radius": qstr(node.radius),
                "size": node.size, "invariants": records[node.id].as_dict(),
            })
        return _json.dumps(payload, sort_keys=True, indent=1) + "\n"
    cols = ["id", "b", "e", "nu", "n", "m", "i", "p", "s", "gamma", "delta",
            "p0", "s0", "gamma0", "genus"]
    rows = [cols]
    for node in tree.nodes:
        r = records[node.id]
        rows.append([str(node.id), str(r.b), str(r.e), qstr(r.nu), str(r.n),
                     str(r.m), str(r.i_v), str(r.p), qstr(r.s), str(r.gamma),
                     str(r.delta), str(r.p0), qstr(r.s0), str(r.gamma0),
                     str(r.genus)])
    widths = [max(len(row[i]) for row in rows) for i in range(len(cols))]
    out = []
    for idx, row in enumerate(rows):
        out.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        if idx == 0:
            out.append("-" * len(out[0]))
    out.append("")
    out.append("intro-normalization annotation (nu scaled by the cluster degree):")
    for node in tree.nodes:
        r = records[node.id]
        out.append(f"  #{node.id}: nu'={qstr(r.nu_intro)} s'={qstr(r.s_intro)} "
                   f"s0'={qstr(r.s0_intro)}")
    return "\n".join(out) + "\n"


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "selfcheck":
            ok = selfcheck(args)
            return 0 if ok else 2
        if args.prime is None:
            print("error: --prime is required", file=sys.stderr)
            return 1
        K = BaseField(args.prime, args.unramified_degree)
        f = _input_poly(args, K)
        tree = build_cluster_tree(f, K, mode=args.residue_mode,
                                  extension_budget=args.extension_budget,
                                  seed=args.seed)
        if args.command == "picture":
            sys.stdout.write(_render_picture(tree, args.format))
            return 0
        if tree.root is None:
            print("error: no proper clusters (degree < 2?)", file=sys.stderr)
            return 1
        records = all_records(tree)
        if args.command == "invariants":
            sys.stdout.write(_render_invariants(tree, records, args.format))
            return 0
        fib = assemble(tree, records)
        fmt = "ascii" if args.format == "tikz" else args.format
        data = export(fib, fmt)
        sys.stdout.buffer.write(data)
        return 0
    except (PolySyntaxError, NotSeparable, ResidueModeOverflow, ValueError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1
    except InternalInconsistency as ex:
        print(f"internal consistency failure: {ex}", file=sys.stderr)
        return 2


# ---------------------------------------------------------------------------
# Selfcheck


_CORPUS = [
    (5, "(x^2-5)^3 - 5^5"),
    (3, "(x^2-3)^3 - 3^5"),
    (7, "(x^3-2*7)^2 - 7*x^2*(x^3-2*7)"),
    (3, "(x^3-2*3)^2 - 3*x^2*(x^3-2*3)"),
    (5, "(x-5)*(x+5)*(x-30)*(x+30)"),
    (5, "(x-5)*(x-30)*(x-10)*(x-35)*(x-15)*(x-40)"),
    (5, "x^3-5"),
    (5, "x^2-5"),
    (3, "(x-3)*(x-12)*(x-6)*(x+3)"),
    (5, "((x^2-5)^3-5^5)*(x^2+5)"),
    (3, "(x^2+1)^2 - 3^5"),  # forces a residue extension in geometric mode
]


def selfcheck(args) -> bool:
    """Run the property suites; print one line per suite; True iff all pass."""
    rng = random.Random(args.seed)
    ok = True
    ok &= _report("farey chain properties", _check_farey(rng))
    inputs = list(_CORPUS)
    if args.expression or args.coeffs:
        if args.prime is None:
            print("error: --prime is required with an expression", file=sys.stderr)
            return False
        K = BaseField(args.prime, args.unramified_degree)
        f = _input_poly(args, K)
        inputs.append((args.prime, None, K, f))
    for entry in inputs:
        if len(entry) == 2:
            p, expr = entry
            K = BaseField(p)
            f = parse_poly(expr, K)
            label = f"p={p} {expr}"
        else:
            p, _, K, f = entry
            label = f"p={p} (user input)"
        ok &= _report(f"corpus [{label}]", _check_instance(K, f, args, rng))
    return ok


def _report(name, passed) -> bool:
    print(("PASS  " if passed else "FAIL  ") + name)
    return passed


def _check_farey(rng) -> bool:
    try:
        for _ in range(500):
            alpha = rng.randrange(1, 7)
            a = Fraction(rng.randrange(-60, 60), rng.randrange(1, 12))
            b = a - Fraction(rng.randrange(1, 40), rng.randrange(1, 12))
            ch = farey_chain(alpha, a, b)
            fr = ch.fractions
            for xx, yy in zip(fr, fr[1:]):
                if xx.numerator * yy.denominator - yy.numerator * xx.denominator != 1:
                    return False
            for k in range(1, len(fr) - 1):
                xx, yy = fr[k - 1], fr[k + 1]
                if xx.numerator * yy.denominator - yy.numerator * xx.denominator == 1:
                    return False
            t = rng.randrange(-4, 5)
            if farey_chain(alpha, a + t, b + t).dens != ch.dens:
                return False
    except Exception:
        return False
    return True


def _check_instance(K, f, args, rng) -> bool:
    """Tree laws, record cross-checks, reduction properties, and the
    ell-choice invariance of the assembled fibre, on one input."""
    try:
        for mode in ("exact", "geometric"):
            tree = build_cluster_tree(f, K, mode=mode,
                                      extension_budget=args.extension_budget,
                                      seed=args.seed)
            if tree.root is None:
                continue
            records = all_records(tree)  # nu identity + genus cross-check inside
            fib = assemble(tree, records)
            shifted = assemble(tree, all_records(tree, ell_offset=1))
            if not graphs_isomorphic(fibre_graph(fib), fibre_graph(shifted)):
                return False
            if not _check_reduction_properties(tree, rng):
                return False
    except Exception as ex:  # any failure, including internal asserts, fails the suite
        print(f"      exception: {type(ex).__name__}: {ex}", file=sys.stderr)
        return False
    return True


def _check_reduction_properties(tree, rng) -> bool:
    from .newton import reduce_poly
    K = tree.field
    for node in tree.nodes:
        cc = cluster_chain(node)
        done = 0
        while done < 200 // max(1, len(tree.nodes)):
            g = K.poly([rng.randrange(-99, 99) for _ in range(rng.randrange(1, 5))])
            h = K.poly([rng.randrange(-99, 99) for _ in range(rng.randrange(1, 5))])
            if g.is_zero() or h.is_zero():
                continue
            rg, rh, rgh = reduce_poly(cc, g), reduce_poly(cc, h), reduce_poly(cc, g * h)
            if rgh.poly != rg.poly * rh.poly:
                return False
            if rg.poly.degree != (rg.i1 - rg.i0) // rg.b or rg.poly[0].is_zero():
                return False
            done += 1
    return True


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
