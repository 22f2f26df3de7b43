"""Command line interface: germ file ingestion, dispatch, JSON reporting.

Exit status 0 on success, 1 on input or usage errors, 2 when a mathematical
consistency check fails.  Output is a single JSON document on stdout; two
runs with identical inputs, seed and flags produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .cache import cache_from_environment
from .context import ComputeContext
from .equising import whitney_verdict, slice_chain
from .errors import GermLabError, InputError
from .germfile import germ_to_dict, load_germ_file
from .invariants import build_invariant_report
from .local import DEFAULT_DEGREE_CAP
from .multipoint import GermSpec, verify_multiple_point_structure


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("file", help="germ or family JSON file")
    parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    parser.add_argument(
        "--max-degree",
        type=int,
        default=DEFAULT_DEGREE_CAP,
        help=f"total degree cap for local computations (default {DEFAULT_DEGREE_CAP})",
    )
    parser.add_argument("--json", metavar="PATH", default=None, help="also write the report to PATH")
    parser.add_argument("--no-cache", action="store_true", help="disable the standard basis cache")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="germlab",
        description="singularity invariants of corank-one map germs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="verify the multiple point structure")
    _add_common(p_check)

    p_inv = sub.add_parser("invariants", help="full invariant report")
    _add_common(p_inv)

    p_slice = sub.add_parser("slice", help="transverse slice germ")
    _add_common(p_slice)
    p_slice.add_argument("--level", type=int, default=1, help="slice depth (default 1)")

    p_eq = sub.add_parser("equising", help="Whitney equisingularity verdict for a family")
    _add_common(p_eq)
    p_eq.add_argument("--samples", type=int, default=2, help="number of sampled parameters")

    return parser


def _context(args) -> ComputeContext:
    return ComputeContext(
        seed=args.seed,
        degree_cap=args.max_degree,
        cache=cache_from_environment(no_cache=args.no_cache),
    )


def _specialized(germ: GermSpec, report: dict) -> GermSpec:
    if germ.params:
        report["specialized_at"] = "0"
        germ = germ.specialize(Fraction(0))
    return germ


def _run(args) -> tuple[dict, int]:
    germ = load_germ_file(args.file)
    ctx = _context(args)
    header = {"command": args.command, "input": args.file, "seed": args.seed}

    if args.command == "check":
        head = dict(header)
        g = _specialized(germ, head)
        report = verify_multiple_point_structure(g, ctx).as_json()
        out = {**head, **report, "flags": sorted(ctx.flags)}
        return out, 0 if report["a_finite_at_desk_scale"] else 1

    if args.command == "invariants":
        head = dict(header)
        g = _specialized(germ, head)
        report = build_invariant_report(g, ctx)
        out = {**head, **report}
        return out, 0 if report["consistency"] == "CONSISTENT" else 2

    if args.command == "slice":
        head = dict(header)
        g = _specialized(germ, head)
        if not (0 <= args.level <= g.source_dim - 1):
            raise InputError(
                f"slice level must lie between 0 and {g.source_dim - 1}", level=args.level
            )
        chain = slice_chain(g, ctx) if args.level else None
        sliced = chain.germs[args.level] if chain else g
        out = {
            **head,
            "level": args.level,
            "germ": germ_to_dict(sliced),
            "certificates": chain.certificates[: args.level] if chain else [],
            "flags": sorted(ctx.flags),
        }
        return out, 0

    if args.command == "equising":
        if not germ.params:
            raise InputError("equising needs a family file with one parameter")
        verdict = whitney_verdict(germ, args.samples, ctx)
        out = {**header, "samples": args.samples, **verdict.as_json()}
        return out, 0

    raise InputError(f"unknown command {args.command!r}")


def _emit(obj: dict, path) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    sys.stdout.write(text)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out, status = _run(args)
    except GermLabError as exc:
        _emit({"error": exc.as_json()}, getattr(args, "json", None))
        return exc.exit_status
    _emit(out, args.json)
    return status


if __name__ == "__main__":
    sys.exit(main())
