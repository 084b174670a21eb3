"""Command-line front end: ``gkmcalc <command> [graph options] [command options]``.

Exit codes: 0 success, 2 usage error, 3 resource cap exceeded,
4 verification failure (for instance decomposing a non-class).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import checks
from .config import Limits, load_limits
from .errors import (ConfigurationError, InternalError, NotDivisibleError, ResourceLimitError,
                     UsageError, VerificationError)
from .gkm import (GkmClass, decompose, delta_word, flowup_basis, structure_constants, verify_gkm,
                  weyl_act)
from .graph import SCHEMA_VERSION, MomentGraph, build_bitstring, export, moment_graph, preset
from .poly import alpha_expand
from .roots import FAMILIES, RootSystem, build_root_system, parse_word, word_to_text
from .schubert import kappa_parabolic, verify_product_identity

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_VERIFY = 0, 2, 3, 4


class ChecksFailed(VerificationError):
    def __init__(self, report: str):
        super().__init__("invariant checks failed")
        self.report = report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _graph_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=FAMILIES, type=str.upper)
    p.add_argument("--rank", type=int)
    p.add_argument("--parabolic", default="",
                   help="comma-separated simple-root indices J (default: none, the full flag)")
    p.add_argument("--preset", help="grassmannian:k,n or isotropic-b|c|d:k,n")
    p.add_argument("--format", choices=("text", "json", "dot"), default="text")
    p.add_argument("--output", help="write here instead of stdout")
    p.add_argument("--config", help="key=value file with resource caps")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gkmcalc", description="GKM Schubert calculus on G/P.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    _graph_options(sub.add_parser("graph", help="emit the moment graph"))
    p = sub.add_parser("localize", help="value of p_W at the vertex V")
    _graph_options(p)
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--at", required=True)
    _graph_options(sub.add_parser("basis", help="the flow-up basis"))
    p = sub.add_parser("act", help="left action of a Weyl element on a class")
    _graph_options(p)
    p.add_argument("--w", required=True)
    p.add_argument("--class", dest="cls")
    p.add_argument("--input", help="class JSON file")
    p = sub.add_parser("ddiff", help="divided differences, first listed index first")
    _graph_options(p)
    p.add_argument("--word", required=True, help="indices such as 2,1")
    p.add_argument("--class", dest="cls")
    p.add_argument("--input", help="class JSON file")
    p = sub.add_parser("decompose", help="expand a class in the flow-up basis")
    _graph_options(p)
    p.add_argument("--input", required=True)
    p = sub.add_parser("constants", help="structure constants of p_U p_V")
    _graph_options(p)
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--ordinary", action="store_true",
                   help="non-equivariant constants plus the check modulo I")
    p = sub.add_parser("schubert-poly", help="Schubert polynomial of W")
    _graph_options(p)
    p.add_argument("--w", required=True)
    p.add_argument("--basis", choices=("t", "alpha"), default="t")
    p = sub.add_parser("selftest", help="run the invariant checks")
    _graph_options(p)
    p.add_argument("--max-order", type=int, default=24,
                   help="without a graph, check every (W, J) with |W| up to this")
    return parser


def group_order(family: str, rank: int) -> int:
    from math import factorial

    if family == "A":
        return factorial(rank + 1)
    if family == "D":
        return 2 ** (rank - 1) * factorial(rank)
    return 2 ** rank * factorial(rank)


def _resolve_graph(args, limits: Limits) -> MomentGraph:
    bitargs = None
    if args.preset:
        if args.parabolic:
            raise UsageError("give either --preset or --parabolic, not both")
        family, rank, J, bitargs = preset(args.preset)
        if (args.family and args.family != family) or (args.rank and args.rank != rank):
            raise UsageError(f"preset {args.preset} is {family}{rank}, which conflicts with --family/--rank")
    else:
        if not args.family or args.rank is None:
            raise UsageError("need --family and --rank, or --preset")
        family, rank = args.family, args.rank
        try:
            J = [int(x) for x in args.parabolic.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"bad --parabolic {args.parabolic!r}") from None
    if rank < 1 or (family == "D" and rank < 2):
        raise UsageError(f"{family}{rank} is not a valid root system")
    order = group_order(family, rank)
    if order > limits.max_group_order:
        raise ResourceLimitError(f"|W| = {order} exceeds max_group_order = {limits.max_group_order}")
    R = build_root_system(family, rank)
    g = moment_graph(R, R.parabolic(J))
    if bitargs is not None:
        # same vertices and edges, plus bit-string names
        bits = build_bitstring(*bitargs)
        if bits.ref != g.ref:
            raise InternalError("bit-string graph disagrees with the generic graph")
        return bits
    return g


def _table(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(r[k]) for r in rows) for k in range(len(rows[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def _class_text(p: GkmClass, title: str) -> str:
    g = p.graph
    return title + "\n" + _table([["  " + g.name(v), str(val)] for v, val in enumerate(p.values)])


def _graph_text(g: MomentGraph) -> str:
    R = g.system
    head = f"{R.name} J={{{','.join(map(str, sorted(g.parabolic)))}}}: {len(g.vertices)} vertices, {len(g.edges)} edges\n"
    cols = ["id", "word", "length"] + (["bits"] if g.bits else [])
    rows = [cols]
    for v in range(len(g.vertices)):
        row = [str(v), g.name(v), str(g.lengths[v])]
        if g.bits:
            row.append(g.bits[v])
        rows.append(row)
    out = head + _table(rows)
    if g.edges:
        out += "\n" + _table([[g.name(e.src), "->", g.name(e.dst), str(e.label)] for e in g.edges])
    return out


def _json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _load_class(args, g: MomentGraph) -> GkmClass:
    if bool(args.cls) == bool(getattr(args, "input", None)):
        raise UsageError("give exactly one of --class and --input")
    if args.cls:
        return flowup_basis(g).classes[g.vertex_id(args.cls)]
    try:
        with open(args.input, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.input} is not JSON: {exc}") from exc
    p = GkmClass.from_dict(data, g)
    report = verify_gkm(p)
    if not report.ok:
        e, r = report.violations[0]
        raise VerificationError(
            f"input is not a GKM class: {g.name(e.src)} -> {g.name(e.dst)} "
            f"({e.label}) leaves remainder {r}")
    return p


def _emit_class(p: GkmClass, fmt: str, title: str) -> str:
    return _json(p.to_dict()) if fmt == "json" else _class_text(p, title)


def _parse_element(R: RootSystem, text: str):
    try:
        return R.from_word(parse_word(text))
    except (ValueError, IndexError) as exc:
        raise UsageError(f"bad Weyl element {text!r}: {exc}") from None


def run(args, limits: Limits) -> str:
    if args.command == "selftest" and not (args.preset or args.family):
        return _selftest_all(args)
    g = _resolve_graph(args, limits)
    R = g.system
    fmt = args.format
    if fmt == "dot" and args.command != "graph":
        raise UsageError("--format dot is only available for the graph command")

    if args.command == "graph":
        if fmt == "text":
            return _graph_text(g)
        return export(g, fmt)

    if args.command == "localize":
        value = flowup_basis(g).classes[g.vertex_id(args.cls)].values[g.vertex_id(args.at)]
        if fmt == "json":
            return _json({"schema_version": SCHEMA_VERSION, "class": g.name(g.vertex_id(args.cls)), "at": g.name(g.vertex_id(args.at)),
                          "value": str(value)})
        return f"{value}\n"

    if args.command == "basis":
        basis = flowup_basis(g)
        if fmt == "json":
            return _json({g.name(v): p.to_dict() for v, p in enumerate(basis.classes)})
        return "\n".join(_class_text(p, f"p[{g.name(v)}]") for v, p in enumerate(basis.classes))

    if args.command == "act":
        w = _parse_element(R, args.w)
        return _emit_class(weyl_act(w, _load_class(args, g)), fmt, f"{word_to_text(w.word)} . class")

    if args.command == "ddiff":
        try:
            word = [int(x) for x in args.word.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"bad --word {args.word!r}") from None
        if any(not 1 <= i <= R.rank for i in word):
            raise UsageError(f"indices must lie in 1..{R.rank}")
        if len(word) > limits.max_word_length:
            raise ResourceLimitError(f"word length {len(word)} exceeds max_word_length = {limits.max_word_length}")
        p = delta_word(word, _load_class(args, g))
        return _emit_class(p, fmt, "delta_" + ",".join(map(str, word)) + " class")

    if args.command == "decompose":
        args.cls = None
        coeffs = decompose(_load_class(args, g), flowup_basis(g))
        named = {word_to_text(c.word): str(q) for c, q in coeffs.items()}
        if fmt == "json":
            return _json({"schema_version": SCHEMA_VERSION, "graph_ref": g.ref, "coefficients": named})
        order = [word_to_text(c.word) for c in sorted(coeffs, key=g.vertex_id)]
        return _table([[k, named[k]] for k in order]) if order else "0\n"

    if args.command == "constants":
        u, v = g.vertex_id(args.u), g.vertex_id(args.v)
        if args.ordinary:
            report = verify_product_identity(g.vertices[u], g.vertices[v], g)
            if fmt == "json":
                return report.to_json()
            rows = [[k, str(c)] for k, c in sorted(report.constants.items(), key=lambda kv: g.vertex_id(kv[0]))]
            out = _table(rows) if rows else "0\n"
            return out + f"modulo I: {'holds' if report.in_ideal else 'FAILS'}\n"
        consts = structure_constants(g.vertices[u], g.vertices[v], g)
        named = {word_to_text(c.word): str(q) for c, q in consts.items()}
        if fmt == "json":
            return _json({"schema_version": SCHEMA_VERSION, "u": g.name(u), "v": g.name(v), "constants": named})
        order = [word_to_text(c.word) for c in sorted(consts, key=g.vertex_id)]
        return _table([[k, named[k]] for k in order]) if order else "0\n"

    if args.command == "schubert-poly":
        c = g.vertices[g.vertex_id(args.w)]
        poly = kappa_parabolic(c, g.parabolic)
        text = alpha_expand(poly, R).to_text() if args.basis == "alpha" else str(poly)
        if fmt == "json":
            return _json({"schema_version": SCHEMA_VERSION, "w": word_to_text(c.word), "basis": args.basis, "polynomial": text})
        return text + "\n"

    if args.command == "selftest":
        return _selftest_graph(g, fmt)
    raise UsageError(f"unknown command {args.command}")


def _selftest_graph(g: MomentGraph, fmt: str) -> str:
    results = {name: fn() for name, fn in checks.graph_checks(g.system, g.parabolic).items()}
    failed = {k: v for k, v in results.items() if v}
    if fmt == "json":
        out = _json({"schema_version": SCHEMA_VERSION,
                     "checks": {k: ("pass" if not v else v) for k, v in results.items()}})
    else:
        out = "".join(f"{'PASS' if not v else 'FAIL'}  {k}" + "".join(f"\n      {m}" for m in v[:5]) + "\n"
                      for k, v in results.items())
    if failed:
        raise ChecksFailed(out)
    return out


def _selftest_all(args) -> str:
    result = checks.run_suite(max_order=args.max_order)
    if args.format == "json":
        out = _json({"schema_version": SCHEMA_VERSION, "completed": result.completed, "failures": result.failures})
    else:
        out = "".join(f"checked {c}\n" for c in result.completed)
        out += "".join(f"FAIL {f}\n" for f in result.failures)
        out += f"{len(result.completed)} cases, {len(result.failures)} failures\n"
    if result.failures:
        raise ChecksFailed(out)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    code = EXIT_OK
    try:
        limits = load_limits(args.config)
        out = run(args, limits)
    except ChecksFailed as exc:
        out, code = exc.report, EXIT_VERIFY
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except ResourceLimitError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ConfigurationError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InternalError, NotDivisibleError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
