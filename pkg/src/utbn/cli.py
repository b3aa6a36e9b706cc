"""Command-line entry point.

Exit status: 0 on success, 1 when a verification fails, 2 on usage or
parse errors.  Diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import io
from .analyze import bound_report
from .benes import apply, build_benes, format_permutation, parse_permutation, route
from .construct import build_universal
from .embed import check_universal, embed_tree
from .errors import (
    FingerprintMismatchError,
    InternalInvariantError,
    InvalidChoiceError,
    LabelMismatchError,
    NewickParseError,
)
from .graph import base_tree_violations


class _Usage(Exception):
    pass


def _positive(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_tree(text: str, n: int):
    try:
        tree = io.parse_newick(text)
    except NewickParseError as e:
        raise _Usage(f"bad tree: {e}") from None
    expected = {str(i) for i in range(1, n + 1)}
    if tree.label_set != expected:
        raise _Usage(f"tree must have leaves 1..{n}, got {sorted(tree.label_set, key=str)}")
    return tree


def cmd_build(args) -> int:
    U = build_universal(args.n)
    if args.format == "json":
        text = io.dumps(io.to_json_graph(U.net))
    elif args.format == "dot":
        text = io.to_dot(U.net, name=f"U{args.n}")
    else:
        text = io.to_enewick(U.net) + "\n"
    _write(text, args.output)
    return 0


def cmd_embed(args) -> int:
    U = build_universal(args.n)
    tree = _parse_tree(args.tree, args.n)
    cert = embed_tree(U, tree)
    if args.emit == "dot":
        text = io.to_dot(U.net, cert.choice, name=f"U{args.n}")
    else:
        text = io.dumps(io.choice_to_json(U.net, cert.choice))
    _write(text, args.output)
    return 0


def cmd_verify(args) -> int:
    U = build_universal(args.n)
    tree = _parse_tree(args.tree, args.n)
    try:
        with open(args.choice, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise _Usage(f"cannot read choice file: {e}") from None
    try:
        choice = io.choice_from_json(U.net, raw)
    except FingerprintMismatchError as e:
        print(f"fingerprint-mismatch: {e}", file=sys.stderr)
        return 1
    except InvalidChoiceError as e:
        print(f"invalid-choice: {e}", file=sys.stderr)
        return 1
    except (KeyError, TypeError, ValueError) as e:
        raise _Usage(f"malformed choice file: {e}") from None
    problems = base_tree_violations(U.net, choice, tree)
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        return 1
    print(f"base tree verified: {io.to_newick(tree)}")
    return 0


def cmd_check_universal(args) -> int:
    report = check_universal(args.n, jobs=args.jobs)
    print(report)
    for f in report.failures:
        print(f"FAIL {f}", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_benes(args) -> int:
    try:
        perm = parse_permutation(args.perm)
    except ValueError as e:
        raise _Usage(str(e)) from None
    if len(perm) != args.n:
        raise _Usage(f"permutation has {len(perm)} entries, expected {args.n}")
    net = build_benes(args.n)
    settings = route(net, perm)
    print(f"permutation: {format_permutation(perm)}")
    for s in net.switches:
        state = "crossed" if settings[s.id] else "straight"
        print(f"switch {s.id + 1} wires {s.wires[0] + 1},{s.wires[1] + 1}: {state}")
    realised = apply(net, settings)
    ok = realised == perm
    print(f"round-trip: {format_permutation(realised)} {'ok' if ok else 'MISMATCH'}")
    return 0 if ok else 1


def cmd_stats(args) -> int:
    if args.first > args.last:
        raise _Usage("--from must not exceed --to")
    print(f"{'n':>6} {'r(U_n)':>8} {'ceil(log2 b_n)':>15} {'r/(n log2 n)':>13}")
    for n in range(args.first, args.last + 1):
        rep = bound_report(build_universal(n))
        print(f"{rep.n:>6} {rep.r:>8} {rep.info_bound:>15} {rep.format_ratio():>13}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="utbn", description="Universal tree-based networks with O(n log n) reticulations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="emit U_n")
    p.add_argument("-n", type=_positive, required=True)
    p.add_argument("--format", choices=["json", "dot", "enewick"], default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("embed", help="base-tree certificate for a tree")
    p.add_argument("-n", type=_positive, required=True)
    p.add_argument("--tree", required=True, help="Newick string on leaves 1..n")
    p.add_argument("--emit", choices=["choice", "dot"], default="choice")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("verify", help="check a choice file against a tree")
    p.add_argument("-n", type=_positive, required=True)
    p.add_argument("--tree", required=True)
    p.add_argument("--choice", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check-universal", help="embed and verify every tree on n leaves")
    p.add_argument("-n", type=_positive, required=True)
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_check_universal)

    p = sub.add_parser("benes", help="route a permutation through the Beneš network")
    p.add_argument("-n", type=_positive, required=True)
    p.add_argument("--perm", required=True, help='1-based images, e.g. "4 1 3 2"')
    p.set_defaults(func=cmd_benes)

    p = sub.add_parser("stats", help="reticulation counts against the bounds")
    p.add_argument("--from", dest="first", type=_positive, required=True)
    p.add_argument("--to", dest="last", type=_positive, required=True)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Usage as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except LabelMismatchError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except InternalInvariantError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
