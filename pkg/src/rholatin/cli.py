"""Command-line front end.

Exit codes: 0 feasible / valid / no disagreement, 1 infeasible / invalid /
disagreement, 2 unreadable or malformed input, 3 search budget exceeded.
"""

from __future__ import annotations

import argparse
from concurrent.futures import ProcessPoolExecutor
from functools import partial, reduce
import json
import sys

from .completion import construct, construct_with_diagonal, solve
from .conditions import Condition, ConditionVerdict, is_rho_admissible, is_rho_d_admissible, theorem_verdict_by_subsets
from .core import BudgetError, RhoInstance, RhoVector, StructuralError, count_occurrences, validate_square
from .factor import build_gamma, diag_window, nodiag_window, solve_gf_factor
from .io import InputError, dumps, grid_from_json, read_instance, square_to_json
from .oracle import MODES, crosscheck

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _int_csv(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _write(text: str, path: "str | None") -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _flow_verdict(instance: RhoInstance) -> ConditionVerdict:
    rho, sq, d = instance.rho, instance.square, instance.tail
    n, r = rho.n, sq.r
    e = count_occurrences(sq)
    adm = is_rho_admissible(e, rho, r) if d is None else is_rho_d_admissible(e, rho, d, r)
    if not adm or r == n:
        return adm
    window = nodiag_window(n, r, rho, e) if d is None else diag_window(n, r, rho, e, d)
    result = solve_gf_factor(build_gamma(sq), window)
    if result.feasible:
        return ConditionVerdict(True)
    label = Condition.COMBINED if d is None else Condition.COMBINED_TAIL
    return ConditionVerdict(False, label, witness=result.witness)


def _select_tail(instance: RhoInstance, args) -> RhoInstance:
    if args.nodiag:
        return instance.without_tail()
    if args.diag and instance.tail is None:
        raise InputError("--diag needs a 'diagonal_tail' field in the instance")
    return instance


def cmd_check(args) -> int:
    instance = _select_tail(read_instance(args.instance), args)
    verdicts = {}
    if args.method in ("subsets", "both"):
        verdicts["subsets"] = theorem_verdict_by_subsets(instance.square, instance.rho, instance.tail)
    if args.method in ("flow", "both"):
        verdicts["flow"] = _flow_verdict(instance)
    outcomes = {v.satisfied for v in verdicts.values()}
    if len(outcomes) > 1:
        for name, v in verdicts.items():
            print(f"{name}: {v.describe()}")
        print("methods disagree")
        return EXIT_NO
    verdict = next(iter(verdicts.values()))
    print("completable" if verdict else "not completable: " + verdict.describe())
    return EXIT_OK if verdict else EXIT_NO


def cmd_complete(args) -> int:
    instance = _select_tail(read_instance(args.instance), args)
    out = solve(instance)
    if isinstance(out, ConditionVerdict):
        print("not completable: " + out.describe(), file=sys.stderr)
        return EXIT_NO
    _write(dumps(square_to_json(out, instance.rho, instance.tail)), args.out)
    return EXIT_OK


def cmd_construct(args) -> int:
    try:
        rho = RhoVector(args.rho, args.n)
        if rho.k != args.k:
            raise InputError(f"--rho has {rho.k} entries but --k is {args.k}")
        if args.tail is None:
            out = construct(args.n, args.k, rho)
        else:
            out = construct_with_diagonal(args.n, args.k, rho, args.tail)
    except StructuralError as exc:
        raise InputError(str(exc)) from exc
    if isinstance(out, ConditionVerdict):
        print("no such square: " + out.describe(), file=sys.stderr)
        return EXIT_NO
    _write(dumps(square_to_json(out, rho, args.tail)), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.square, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict) or not isinstance(obj.get("n"), int):
        raise InputError("square file must be an object with an integer 'n'")
    n = obj["n"]
    rho_entries = args.rho if args.rho is not None else obj.get("rho")
    if rho_entries is None:
        raise InputError("no rho given (use --rho or a 'rho' field)")
    tail = args.tail if args.tail is not None else obj.get("diagonal_tail")
    rows = grid_from_json(obj, n)
    try:
        rho = RhoVector(tuple(rho_entries), n)
        r = n - sum(tail) if tail is not None else 0
        report = validate_square(rows, rho, tail, r)
    except StructuralError as exc:
        raise InputError(str(exc)) from exc
    if report.valid:
        print("valid")
        return EXIT_OK
    for line in report.violations:
        print(line)
    return EXIT_NO


def _run_shard(run, shard):
    return run(shard=shard)


def cmd_crosscheck(args) -> int:
    run = partial(crosscheck, args.n_max, args.k_max, args.mode, shards=args.shards, n_min=args.n_min,
                  sample=args.sample, seed=args.seed, node_budget=args.node_budget)
    shards = range(args.shards)
    if args.shards == 1:
        parts = [run(shard=0)]
    else:
        with ProcessPoolExecutor(args.shards) as pool:
            parts = list(pool.map(_run_shard, [run] * args.shards, shards))
    report = reduce(lambda a, b: a.merge(b), parts)
    body = report.to_json()
    _write(dumps(body), args.out)
    print(f"{args.mode}: {report.agreements}/{report.instances_tested} agree, "
          f"{len(report.disagreements)} disagreements, complete={report.complete}, "
          f"{report.elapsed:.1f}s", file=sys.stderr)
    if not report.complete:
        return EXIT_BUDGET
    return EXIT_OK if not report.disagreements else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rholatin", description="Complete symmetric rho-latin rectangles.")
    sub = parser.add_subparsers(dest="command", required=True)

    def tail_flags(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--diag", action="store_true", help="require and honour the diagonal tail")
        group.add_argument("--nodiag", action="store_true", help="ignore any diagonal tail")

    p = sub.add_parser("check", help="decide completability")
    p.add_argument("instance")
    tail_flags(p)
    p.add_argument("--method", choices=("subsets", "flow", "both"), default="flow")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("complete", help="write a completed square")
    p.add_argument("instance")
    tail_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("construct", help="build a square from scratch")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rho", type=_int_csv, required=True)
    p.add_argument("--tail", type=_int_csv, help="multiset of diagonal symbol counts")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="validate a full square")
    p.add_argument("square")
    p.add_argument("--rho", type=_int_csv)
    p.add_argument("--tail", type=_int_csv)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("crosscheck", help="compare verdicts against brute force")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--sample", type=int, help="check a seeded random subset of this size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--node-budget", type=int, default=2_000_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_crosscheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, StructuralError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
