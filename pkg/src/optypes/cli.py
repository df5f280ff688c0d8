"""Command-line interface.

Exit codes: 0 relation holds / success, 1 relation fails, 2 usage or parse
error, 3 internal invariant breach. Errors go to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import documents
from .algebra import Shape, compare_functions, signature
from .errors import (
    InputBelowMinimum,
    InvalidGrid,
    InvalidParams,
    InvalidSeed,
    OpTypesError,
    ParseError,
    SchemaVersionMismatch,
    UnknownPreset,
)
from .generator import GRID_PRESETS, compare_modes, generate_type_equivalent_convs, parse_grid, preset_grid
from .graph import interchange, validate
from .ops import parse_op
from .relations import ShapeDomain, dedup, forward_compat, partition_types
from .space import SPACE_PRESETS, SearchSpace, preset_space

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

_USAGE_ERRORS = (ParseError, InvalidParams, UnknownPreset, InvalidGrid, InvalidSeed, SchemaVersionMismatch)


class UsageError(OpTypesError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message, usage=self.format_usage().strip())


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _sig_line(op) -> str:
    return "; ".join(f"{form}{tuple(rest)}" for form, *rest in signature(op.dimfn))


def _shape(text: str) -> Shape:
    try:
        return Shape(tuple(int(x) for x in text.replace("x", ",").split(",") if x.strip()))
    except ValueError as e:
        raise UsageError(f"bad shape {text!r}: {e}") from None


def _domain(text: str, axes: int) -> ShapeDomain:
    lo, _, hi = text.partition(":")
    try:
        return ShapeDomain.uniform(int(lo), int(hi) if hi else None, axes)
    except ValueError as e:
        raise UsageError(f"bad domain {text!r}: {e}") from None


def _load_space(ref: str) -> SearchSpace:
    if ref in SPACE_PRESETS:
        return preset_space(ref)
    return documents.load(ref).space


# ---------------------------------------------------------------------------


def cmd_check_type_eq(args) -> int:
    a, b = parse_op(args.op_a), parse_op(args.op_b)
    verdict = compare_functions(a.dimfn, b.dimfn, args.domain_hi) if a.axes == b.axes else None
    equal = bool(verdict and verdict.equal)
    print(f"A: {a.label}  {_sig_line(a)}")
    print(f"B: {b.label}  {_sig_line(b)}")
    confidence = "exact" if verdict is None or verdict.exact else "sampled"
    print(f"type-equivalent: {'yes' if equal else 'no'} ({confidence})")
    return EXIT_OK if equal else EXIT_FAIL


def cmd_check_compat(args) -> int:
    a, b = parse_op(args.op_a), parse_op(args.op_b)
    dom = _domain(args.domain, a.axes)
    fwd = forward_compat(a, b, dom)
    try:
        rev, note = forward_compat(b, a, dom), ""
    except InputBelowMinimum as e:
        rev, note = False, f" (domain below B's minimum input {e.details['minimum']})"
    print(f"domain: {dom}")
    print(f"forward  A -> B: {'yes' if fwd else 'no'}")
    print(f"forward  B -> A: {'yes' if rev else 'no'}{note}")
    print(f"complete A <-> B: {'yes' if fwd and rev else 'no'}")
    return EXIT_OK if fwd else EXIT_FAIL


def cmd_generate(args) -> int:
    seed = parse_op(args.seed)
    grid = parse_grid(args.grid)
    report = generate_type_equivalent_convs(seed, grid, args.mode, args.domain_hi)
    base = _load_space(args.base)
    expanded = dedup(base.extend(report.operations(), report.provenance), "complete")
    diff = compare_modes(seed, grid, args.domain_hi)
    _emit(documents.dumps_space(expanded, report, diff), args.out)
    print(
        f"accepted {len(report.accepted)}, rejected {len(report.rejected)}, space size {len(expanded)}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_partition(args) -> int:
    space = _load_space(args.file)
    classes = partition_types(space, args.domain_hi)
    if args.json:
        payload = [
            {"signature": _sig_line(c.representative), "count": len(c), "members": [m.label for m in c.members], "exact": c.exact}
            for c in classes
        ]
        print(json.dumps(payload, indent=2))
        return EXIT_OK
    print(f"{space.name}: {len(space)} ops, {len(classes)} type class(es)")
    for i, c in enumerate(classes):
        tag = "" if c.exact else " [sampled]"
        print(f"  tau{i}: {len(c)} member(s)  {_sig_line(c.representative)}{tag}")
        for label in dict.fromkeys(m.label for m in c.members):
            count = sum(m.label == label for m in c.members)
            print(f"    {label}" + (f" x{count}" if count > 1 else ""))
    return EXIT_OK


def cmd_dedup(args) -> int:
    space = _load_space(args.file)
    out = dedup(space, args.level, args.domain_hi)
    _emit(documents.dumps_space(out), args.out)
    print(f"{len(space)} -> {len(out)} ops", file=sys.stderr)
    return EXIT_OK


def cmd_graph_validate(args) -> int:
    g = documents.load_graph(args.file)
    at = _shape(args.input_shape) if args.input_shape else None
    res = validate(g, at, args.domain_hi)
    if not res.ok:
        print(json.dumps(res.error.to_dict()), file=sys.stderr)
        print("invalid")
        return EXIT_FAIL
    for n in g.topological_order():
        print(f"{n}: {res.shapes[n]}")
    print("ok" + ("" if res.exact else " (joins sampled)"))
    return EXIT_OK


def cmd_graph_interchange(args) -> int:
    g = documents.load_graph(args.file)
    ref = args.with_
    replacement = documents.load_graph(ref) if Path(ref).is_file() else parse_op(ref)
    allow = _shape(args.allow_instant) if args.allow_instant else None
    new = interchange(g, args.node, replacement, allow_instant_at=allow, domain_hi=args.domain_hi)
    _emit(documents.dumps_graph(new), args.out)
    return EXIT_OK


def cmd_preset(args) -> int:
    if args.what == "space":
        _emit(documents.dumps_space(preset_space(args.code)), args.out)
    else:
        grid = preset_grid(args.code)
        doc = {"schema": "optypes.grid", "version": documents.SCHEMA_VERSION, "grid": documents.grid_to_dict(grid)}
        _emit(documents.canonical_json(doc), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="optypes", description="Shape-level type system for network operations.")
    p.add_argument("--domain-hi", type=int, default=None, help="pointwise sweep bound (default $OPTYPES_SWEEP_HI or 4096)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    check = sub.add_parser("check", help="decide a relation between two operation literals")
    csub = check.add_subparsers(dest="relation", required=True, parser_class=_Parser)
    te = csub.add_parser("type-eq")
    te.add_argument("op_a")
    te.add_argument("op_b")
    te.set_defaults(func=cmd_check_type_eq)
    cc = csub.add_parser("compat")
    cc.add_argument("op_a")
    cc.add_argument("op_b")
    cc.add_argument("--domain", required=True, help="LO[:HI] applied to every axis")
    cc.set_defaults(func=cmd_check_compat)

    gen = sub.add_parser("generate", help="generate type-equivalent convolutions from a seed")
    gen.add_argument("--seed", required=True)
    gen.add_argument("--grid", required=True, help=f"preset ({', '.join(sorted(GRID_PRESETS))}) or 'K=lo..hi P=None D=lo..hi'")
    gen.add_argument("--mode", choices=("paper", "strict"), default="strict")
    gen.add_argument("--base", default="S0", help="space preset code or document to expand")
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_generate)

    part = sub.add_parser("partition", help="group a space's operations into type classes")
    part.add_argument("file", help="space document or preset code")
    part.add_argument("--json", action="store_true")
    part.set_defaults(func=cmd_partition)

    dd = sub.add_parser("dedup")
    dd.add_argument("file", help="space document or preset code")
    dd.add_argument("--level", choices=("complete", "type"), default="complete")
    dd.add_argument("--out")
    dd.set_defaults(func=cmd_dedup)

    graph = sub.add_parser("graph")
    gsub = graph.add_subparsers(dest="action", required=True, parser_class=_Parser)
    gv = gsub.add_parser("validate")
    gv.add_argument("file")
    gv.add_argument("--input-shape", help="H,W; omit to check over the declared input domains")
    gv.set_defaults(func=cmd_graph_validate)
    gi = gsub.add_parser("interchange")
    gi.add_argument("file")
    gi.add_argument("--node", required=True)
    gi.add_argument("--with", dest="with_", required=True, help="operation literal or subgraph document")
    gi.add_argument("--allow-instant", help="H,W: accept a replacement equal only at this shape")
    gi.add_argument("--out")
    gi.set_defaults(func=cmd_graph_interchange)

    pre = sub.add_parser("preset", help="emit a preset document")
    pre.add_argument("what", choices=("space", "grid"))
    pre.add_argument("code")
    pre.add_argument("--out")
    pre.set_defaults(func=cmd_preset)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, *_USAGE_ERRORS) as e:
        print(json.dumps(e.to_dict()), file=sys.stderr)
        return EXIT_USAGE
    except OpTypesError as e:
        print(json.dumps(e.to_dict()), file=sys.stderr)
        return EXIT_FAIL
    except (OSError, ValueError) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # noqa: BLE001
        print(json.dumps({"error": "InternalError", "message": f"{type(e).__name__}: {e}"}), file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
