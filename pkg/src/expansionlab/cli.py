"""Command-line driver: ``expansionlab {gap,verify,walk,growth,fourier}``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, ExpansionLabError, TooLarge
from .experiments import (fourier_rows, gap_rows, growth_rows, parse_range,
                          random_symmetric_subset, render, walk_rows)
from .groups import enumerate_group, load_generators, sanov
from .growth import load_subset

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CAP = 0, 1, 2, 3


def _qs(args) -> list[int]:
    if args.q is not None and args.q_range is not None:
        raise ConfigError("give --q or --q-range, not both")
    if args.q_range is not None:
        try:
            return parse_range(args.q_range)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if args.q is None:
        raise ConfigError("--q or --q-range is required")
    return [args.q]


def _gens(args):
    return load_generators(args.gens) if args.gens else sanov()


def cmd_gap(args) -> tuple[str, int]:
    rows = gap_rows(_gens(args), _qs(args), tol=args.tol, seed=args.seed, cap=args.cap)
    return render(rows, args.format), EXIT_OK


def cmd_walk(args) -> tuple[str, int]:
    (q,) = _qs(args)
    return render(walk_rows(_gens(args), q, args.l_max, cap=args.cap), args.format), EXIT_OK


def cmd_growth(args) -> tuple[str, int]:
    (q,) = _qs(args)
    table = enumerate_group(_gens(args), q, cap=args.cap)
    if args.subset:
        A = load_subset(table, args.subset)
    elif args.size:
        A = random_symmetric_subset(table, args.size, args.seed)
    else:
        raise ConfigError("growth needs --subset PATH or --size N")
    return render(growth_rows(A, args.l_max), args.format), EXIT_OK


def cmd_fourier(args) -> tuple[str, int]:
    (q,) = _qs(args)
    try:
        ls = [int(x) for x in args.l_list.split(",")]
    except ValueError:
        raise ConfigError(f"bad --l-list {args.l_list!r}") from None
    return render(fourier_rows(_gens(args), q, ls, C_max=args.C), args.format), EXIT_OK


def cmd_verify(args) -> tuple[str, int]:
    from .verify import run_all
    if args.gens:
        load_generators(args.gens)          # configuration errors surface before any suite
    numbers = [int(x) for x in args.suites.split(",")] if args.suites else None
    results = run_all(numbers, corrupt_formula=args.corrupt_formula, seed=args.seed)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(r.line(), file=sys.stderr)
    report = {"passed": not failed, "suites": [
        {"number": r.number, "name": r.name, "passed": r.passed, "summary": r.summary,
         "seconds": round(r.seconds, 3), "data": r.data} for r in results]}
    return json.dumps(report, indent=1, default=str) + "\n", EXIT_FAIL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gens", help="generator JSON file (default: Sanov pair)")
    common.add_argument("--q", type=int)
    common.add_argument("--q-range", help="A:B[:step], inclusive")
    common.add_argument("--l", type=int, default=3)
    common.add_argument("--l-max", type=int, default=6)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--cap", type=int, default=5_000_000, help="max group order to enumerate")
    common.add_argument("--tol", type=float, default=1e-10)

    ap = argparse.ArgumentParser(prog="expansionlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("gap", parents=[common], help="lambda2 and Cheeger bounds per q")
    v = sub.add_parser("verify", parents=[common], help="run the acceptance suites")
    v.add_argument("--suites", help="comma-separated suite numbers (default: all)")
    v.add_argument("--corrupt-formula", action="store_true", help=argparse.SUPPRESS)
    sub.add_parser("walk", parents=[common], help="exact walk norms for l = 1..l-max")
    g = sub.add_parser("growth", parents=[common], help="tripling and iteration bound")
    g.add_argument("--subset", help="JSON list of element indices")
    g.add_argument("--size", type=int, help="seeded random symmetric subset of about this size")
    f = sub.add_parser("fourier", parents=[common], help="Fourier decay of conjugation orbits")
    f.add_argument("--l-list", default="0,2,4,6,8,10")
    f.add_argument("--C", type=int, default=0, help="also report additive convolution powers 1..C")
    return ap


COMMANDS = {"gap": cmd_gap, "verify": cmd_verify, "walk": cmd_walk, "growth": cmd_growth,
            "fourier": cmd_fourier}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out, code = COMMANDS[args.command](args)
    except TooLarge as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExpansionLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
