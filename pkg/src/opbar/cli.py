"""Command-line front end.

Exit codes: 0 success, 1 check failure, 2 usage or schema error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import checks, registry
from .barpoints import standard_representative
from .cooperad import DecompositionRequest, decompose, decompose_equivariant
from .equivalence import homotopy_H, pi_any, sigma_any
from .operads import Semidirect, check_operad_axioms
from .registry import SchemaError, dumps
from .render import render_point, render_tree

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from None


def _table(args, validate: bool = True):
    if not getattr(args, "spec", None):
        return None
    table = _read_json(args.spec)
    if validate:
        try:
            P = registry.operad(None, None, table)
        except ValueError as exc:
            raise SchemaError(str(exc)) from None
        bad = check_operad_axioms(P, min(P.max_arity, 4))
        if bad:
            raise SchemaError(f"operad table {P.name!r} fails {bad[0].axiom}: {bad[0].witness}")
    return table


def _leaf(token: str):
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        return token


def _leaf_list(text: str) -> frozenset:
    if text is None:
        raise UsageError("decompose needs --A, --a and --B")
    return frozenset(_leaf(t) for t in text.split(",") if t.strip())


def _print(obj) -> None:
    sys.stdout.write(dumps(obj) + "\n")


# ---------------------------------------------------------------- commands


def cmd_normalize(args) -> int:
    obj = _read_json(args.file)
    table = _table(args)
    if registry.is_equivariant(obj):
        x, QG = registry.equivariant_from_json(obj, table)
        _print(registry.equivariant_to_json(x, QG))
    else:
        _print(registry.point_to_json(registry.point_from_json(obj, table)))
    return EXIT_OK


def cmd_map(args) -> int:
    obj = _read_json(args.file)
    table = _table(args)
    if args.name == "sigma":
        if not registry.is_equivariant(obj) and not (obj.get("basepoint") and "group" in obj):
            raise SchemaError("sigma takes an equivariant point {operad, group, zeta, psi}")
        x, QG = registry.equivariant_from_json(obj, table)
        _print(registry.point_to_json(sigma_any(x, QG)))
        return EXIT_OK
    if args.name == "decompose":
        req = DecompositionRequest(_leaf_list(args.A), _leaf(args.a) if args.a else None, _leaf_list(args.B))
        if registry.is_equivariant(obj):
            x, QG = registry.equivariant_from_json(obj, table)
            if x.leafset != req.target:
                raise SchemaError(f"point leaves {sorted(map(str, x.leafset))} are not (A - a) ∪ B")
            a, b = decompose_equivariant(x, req)
            _print([registry.equivariant_to_json(a, QG), registry.equivariant_to_json(b, QG)])
            return EXIT_OK
        p = registry.point_from_json(obj, table)
        if p.leafset != req.target:
            raise SchemaError(f"point leaves {sorted(map(str, p.leafset))} are not (A - a) ∪ B")
        a, b = decompose(p, req)
        _print([registry.point_to_json(a), registry.point_to_json(b)])
        return EXIT_OK
    if registry.is_equivariant(obj):
        raise SchemaError(f"{args.name} takes a point of B(P⋊G), not an equivariant point")
    p = registry.point_from_json(obj, table)
    if not isinstance(p.operad, Semidirect):
        raise SchemaError(f"{args.name} needs a point over P⋊G (give a 'group' field)")
    if args.name == "pi":
        _print(registry.equivariant_to_json(pi_any(p), p.operad))
        return EXIT_OK
    if args.s is None:
        raise UsageError("H needs --s")
    try:
        s = Fraction(args.s)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--s must be a rational number, got {args.s!r}") from None
    if not 0 <= s <= 1:
        raise UsageError("--s must lie in [0, 1]")
    _print(registry.point_to_json(homotopy_H(s, p)))
    return EXIT_OK


def _check_operads(args, suite: str) -> list:
    table = _table(args, validate=False)
    if table is not None:
        return [registry.operad(None, args.group, table)]
    if args.operad:
        return [registry.operad(args.operad, args.group)]
    ops = registry.bundled_pairs()
    if suite == "confluence":
        ops += [registry.operad(name) for name in registry.OPERAD_NAMES]
    return ops


def cmd_check(args) -> int:
    seed = args.seed
    env = os.environ.get("OPBAR_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"OPBAR_SEED must be an integer, got {env!r}") from None
    if args.count is not None and args.count < 0:
        raise UsageError("--count must be nonnegative")
    if args.count == 0:
        print(f"warning: --count=0, suite {args.suite} passes vacuously", file=sys.stderr)
        _print({"suite": args.suite, "seed": seed, "cases": 0, "verdict": "PASS", "vacuous": True})
        return EXIT_OK
    operads = _check_operads(args, args.suite)
    records = checks.run_suite(args.suite, operads, seed, args.count)
    if args.suite == "coassoc" and args.exhaustive:
        for QG in operads:
            if isinstance(QG, Semidirect):
                rec = checks.coassoc_exhaustive(QG, seed)
                rec["seed"] = seed
                records.append(rec)
    for rec in records:
        _print(rec)
    return EXIT_OK if checks.all_passed(records) else EXIT_FAIL


def cmd_render(args) -> int:
    obj = _read_json(args.file)
    table = _table(args)
    p = registry.point_from_json(obj, table)
    if args.standard:
        if p.is_base or not isinstance(p.operad, Semidirect):
            raise SchemaError("--standard needs a non-base point over P⋊G")
        sys.stdout.write(render_tree(standard_representative(p), p.operad, "standard"))
    else:
        sys.stdout.write(render_point(p))
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opbar", description="Bar constructions of operads with exact weights.")
    sub = parser.add_subparsers(dest="command", required=True)

    def spec_flag(p):
        p.add_argument("--spec", help="JSON table defining the operad P")

    p = sub.add_parser("normalize", help="print the canonical form of a point")
    p.add_argument("file", help="point JSON ('-' for stdin)")
    spec_flag(p)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("map", help="apply sigma, pi, H or decompose")
    p.add_argument("name", choices=["sigma", "pi", "H", "decompose"])
    p.add_argument("file", help="input JSON ('-' for stdin)")
    p.add_argument("--s", help="time parameter of H, e.g. 1/2")
    p.add_argument("--A", help="comma-separated leaves of the lower factor (includes --a)")
    p.add_argument("--a", help="leaf of A where B is grafted")
    p.add_argument("--B", help="comma-separated leaves of the upper factor")
    spec_flag(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("check", help="run a seeded check suite")
    p.add_argument("suite", choices=checks.SUITES)
    p.add_argument("--seed", type=int, default=0, help="seed (OPBAR_SEED overrides)")
    p.add_argument("--count", type=int, default=None, help="samples per operad (suite default if omitted)")
    p.add_argument("--operad", choices=registry.OPERAD_NAMES, help="check one operad instead of the bundled pairs")
    p.add_argument("--group", help="group for P⋊G, e.g. Z/2 or S3")
    p.add_argument("--exhaustive", action="store_true", help="coassoc: add the exhaustive 4-leaf sweep")
    spec_flag(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("render", help="emit a DOT rendering")
    p.add_argument("file", help="point JSON ('-' for stdin)")
    p.add_argument("--format", choices=["dot"], default="dot")
    p.add_argument("--standard", action="store_true", help="render the standard representative over P⋊G")
    spec_flag(p)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (SchemaError, UsageError) as exc:
        print(f"opbar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"opbar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
