"""Command-line surface: exact checks and exports for batch use.

Exit status contract: 0 definitive positive (yes / equivalent / 0 failures),
1 definitive negative, 2 indeterminate (a cap was breached), 3 input error.
All results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bicharacter import Bicharacter, DynkinDiagram, diagram as make_diagram
from .catalog import classify_rank3, rank3_expected_keys, verify_tables
from .equivalence import build_diagram_graph, describe_group, generate_WB
from .groupoid import Caps, explore, is_arithmetic, positive_roots
from .subsystems import restrict
from .bicharacter import Basis

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INDETERMINATE = 2
EXIT_INPUT = 3


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"bad {name}={raw!r}")


def _caps_from_args(args: argparse.Namespace) -> Caps:
    objects = args.caps_objects if args.caps_objects else _env_int("ARSYS_CAPS_OBJECTS", 100_000)
    norm = args.caps_norm if args.caps_norm else _env_int("ARSYS_CAPS_NORM", 60)
    depth = args.caps_depth if args.caps_depth else _env_int("ARSYS_CAPS_DEPTH", 64)
    return Caps(objects, norm, depth)


def _read_bicharacter(path: str) -> Bicharacter:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        print(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
              file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    try:
        return Bicharacter.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        print(f"invalid bicharacter: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _emit(obj, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(obj)


def cmd_check(args) -> int:
    chi = _read_bicharacter(args.input)
    verdict = is_arithmetic(chi, _caps_from_args(args))
    payload = {
        "verdict": verdict.kind,
        "reason": verdict.reason,
        "note": verdict.note,
        "roots": [list(r) for r in verdict.roots] if verdict.roots else None,
        "object_count": len(verdict.exploration.objects),
    }
    if args.format == "text":
        line = f"verdict: {verdict.kind}"
        if verdict.reason:
            line += f" ({verdict.reason})"
        print(line)
        if verdict.note:
            print(f"note: {verdict.note}")
        if verdict.roots:
            print(f"|roots| = {len(verdict.roots)}")
    else:
        _emit(payload, "json")
    return {"yes": EXIT_OK, "no": EXIT_NEGATIVE}.get(verdict.kind, EXIT_INDETERMINATE)


def cmd_roots(args) -> int:
    chi = _read_bicharacter(args.input)
    result = explore(chi, _caps_from_args(args))
    if result.verdict != "finite":
        print(f"verdict: {result.verdict}", file=sys.stderr)
        return EXIT_NEGATIVE if result.verdict == "not_full" else EXIT_INDETERMINATE
    positive = positive_roots(result, Basis.standard(chi.n))
    payload = {
        "roots": [list(r) for r in result.roots],
        "positive_roots": [list(r) for r in positive],
        "object_count": len(result.objects),
    }
    if args.format == "text":
        print(f"|roots| = {len(result.roots)}, |positive| = {len(positive)}")
        for r in positive:
            print(" +", list(r))
    else:
        _emit(payload, "json")
    return EXIT_OK


def cmd_diagram(args) -> int:
    chi = _read_bicharacter(args.input)
    d = make_diagram(chi)
    if args.format == "dot":
        print(d.to_dot())
    else:
        _emit(d.to_json(), "json")
    return EXIT_OK


def cmd_graph(args) -> int:
    chi = _read_bicharacter(args.input)
    g = build_diagram_graph(chi, _caps_from_args(args))
    if args.format == "dot":
        print(g.to_dot())
    elif args.format == "text":
        print(f"finite: {g.is_finite}, nodes: {len(g.nodes)}, arrows: {len(g.arrows)}")
    else:
        nodes = sorted(g.nodes)
        index = {key: k for k, key in enumerate(nodes)}
        payload = {
            "finite": g.is_finite,
            "node_count": len(nodes),
            "nodes": [g.nodes[key].to_json() for key in nodes],
            "arrows": [
                {"from": index[src], "vertex": vertex + 1, "to": index[dst]}
                for (src, vertex), dst in sorted(g.arrows.items())
            ],
        }
        _emit(payload, "json")
    return EXIT_OK if g.is_finite else EXIT_INDETERMINATE


def cmd_wb_group(args) -> int:
    chi = _read_bicharacter(args.input)
    wb = generate_WB(chi, _caps_from_args(args))
    if wb.exceeded is not None:
        print(f"W^B closure breached cap: {wb.exceeded}", file=sys.stderr)
        return EXIT_INDETERMINATE
    desc = describe_group(wb)
    payload = {
        "order": desc.order,
        "element_orders": [[d, c] for d, c in desc.element_orders],
        "abelian_invariants": list(desc.abelian_invariants),
        "descriptor": list(desc.matched),
        "generators": [
            {"matrix": [list(row) for row in g.matrix], "provenance": g.provenance}
            for g in wb.generators
        ],
    }
    if args.format == "text":
        print(f"order {desc.order}, descriptor {'/'.join(desc.matched)}")
    else:
        _emit(payload, "json")
    return EXIT_OK


def _parse_roots_arg(text: str) -> list[tuple[int, ...]]:
    out = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(tuple(int(x) for x in part.split(",")))
        except ValueError:
            print(f"bad --roots entry: {part!r}", file=sys.stderr)
            raise SystemExit(EXIT_INPUT)
    if not out:
        print("--roots must name at least one root", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    return out


def cmd_restrict(args) -> int:
    chi = _read_bicharacter(args.input)
    caps = _caps_from_args(args)
    result = explore(chi, caps)
    if result.verdict != "finite":
        print(f"parent verdict: {result.verdict}", file=sys.stderr)
        return EXIT_NEGATIVE if result.verdict == "not_full" else EXIT_INDETERMINATE
    try:
        sub = restrict(result, _parse_roots_arg(args.roots), caps)
    except ValueError as exc:
        print(f"restriction error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    payload = {
        "basis": [list(v) for v in sub.e_h],
        "roots_in_span": [list(v) for v in sub.roots_in_h],
        "restricted_diagram": make_diagram(sub.restricted_chi).to_json(),
        "restricted_verdict": sub.verdict.kind,
    }
    _emit(payload, "json")
    return EXIT_OK if sub.verdict.is_yes else EXIT_INDETERMINATE


def cmd_verify(args) -> int:
    tables = tuple(int(t) for t in args.tables.split(","))
    report = verify_tables(_caps_from_args(args), tables=tables,
                           specials=args.specials, workers=args.workers)
    if args.format == "json":
        payload = {
            "ok": report.ok,
            "rows_verified": report.rows_verified,
            "templates_checked": report.templates_checked,
            "failures": report.failures,
            "wb": {f"T{t}.{r}": list(m[0]) for (t, r), m in sorted(report.wb.items())},
        }
        _emit(payload, "json")
    else:
        print(report.summary())
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_classify(args) -> int:
    result = classify_rank3(args.torsion, _caps_from_args(args), workers=args.workers)
    expected, ctx = rank3_expected_keys(args.torsion)
    got = result.keys_in_context(ctx)
    matches = got == expected
    payload = {
        "torsion_order": args.torsion,
        "candidates": result.candidates,
        "pruned": result.pruned,
        "checked": result.checked,
        "classes": len(result.keys),
        "matches_catalog": matches,
        "diagrams": [result.diagrams[k].to_json() for k in result.keys],
    }
    if args.format == "text":
        print(f"mu_{args.torsion}: {len(result.keys)} classes "
              f"({result.checked} checked, {result.pruned} pruned); "
              f"catalog match: {matches}")
    else:
        _emit(payload, "json")
    return EXIT_OK if matches else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arsys",
        description="exact decision procedures for arithmetic root systems "
                    "of diagonal bicharacters",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--caps-objects", type=int, default=0,
                        help="object cap (env ARSYS_CAPS_OBJECTS)")
    common.add_argument("--caps-norm", type=int, default=0,
                        help="root coordinate cap (env ARSYS_CAPS_NORM)")
    common.add_argument("--caps-depth", type=int, default=0,
                        help="reflection depth cap (env ARSYS_CAPS_DEPTH)")
    common.add_argument("--format", choices=("json", "text", "dot"), default="json")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common],
                       help="decide whether a bicharacter yields an arithmetic root system")
    p.add_argument("input", help="bicharacter JSON file, or - for stdin")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("roots", parents=[common], help="enumerate the root set")
    p.add_argument("input")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("diagram", parents=[common],
                       help="emit the generalized Dynkin diagram (json or dot)")
    p.add_argument("input")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("graph", parents=[common],
                       help="emit the diagram graph (json or dot)")
    p.add_argument("input")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("wb-group", parents=[common],
                       help="compute the group W^B with its descriptor")
    p.add_argument("input")
    p.set_defaults(func=cmd_wb_group)

    p = sub.add_parser("restrict", parents=[common],
                       help="restrict the root system to the span of chosen roots")
    p.add_argument("input")
    p.add_argument("--roots", required=True,
                   help='semicolon-separated integer vectors, e.g. "1,0,0;0,1,1"')
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("verify", parents=[common],
                       help="run the full classification-table regression")
    p.add_argument("--tables", default="1,2")
    p.add_argument("--specials", type=int, default=3)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", parents=[common],
                       help="re-derive the rank-3 classes over mu_N by exhaustive search")
    p.add_argument("--torsion", type=int, required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_classify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_INPUT
        return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
