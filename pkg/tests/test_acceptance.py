"""Acceptance criteria, each run at full size with zero tolerance.

Run with ``pytest tests/test_acceptance.py`` (one summary line per
criterion at the end) or ``python tests/test_acceptance.py``.  The
exhaustive passes take roughly half an hour on one core.
"""

import random
import sys
from functools import lru_cache

import pytest

from conftest import ACCEPTANCE_LINES
from rholatin import SymmetricSquare, complete, validate_square
from rholatin.completion import DETACH_STATS
from rholatin.oracle import crosscheck, random_feasible_instance

FAST_PATHS = ("tail_lower_slack", "tail_upper_slack", "tail_no_bounds", "tail_proportional",
              "free_lower_slack", "free_upper_slack", "free_no_bounds", "free_proportional")


@lru_cache(maxsize=None)
def run(mode, n_max, k_max):
    return crosscheck(n_max, k_max, mode)


def _summary(report):
    return (f"{report.agreements}/{report.instances_tested} agree, "
            f"{len(report.disagreements)} disagreements, {report.elapsed:.0f}s")


def _record(number, passed, text):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def criterion_1():
    rep = run("nodiag", 4, 6)
    return _record(1, rep.ok, "free-diagonal completion vs brute force, n<=4, k<=6: " + _summary(rep))


def criterion_2():
    rep = run("diag", 4, 6)
    return _record(2, rep.ok, "prescribed-tail completion vs brute force, n<=4, k<=6, every tail: "
                   + _summary(rep))


def criterion_3_parts():
    free = run("construct", 5, 7)
    tail = run("construct_diag", 4, 7)
    c = tail.counters
    # built <=> parity and d <= rho; every success validated; n<=4 also matched brute force
    sound = free.ok and tail.ok and c["detach_failed"] == 0
    mismatches = c["parity_holds_but_tail_exceeds_rho"]
    confirmed = c["tail_exceeds_rho_confirmed_infeasible"]
    return free, tail, sound, mismatches, confirmed


def criterion_3():
    free, tail, sound, mismatches, confirmed = criterion_3_parts()
    literal = sound and mismatches == 0
    text = (f"constructors, free diagonal n<=5, k<=7: {_summary(free)}; prescribed diagonal n<=4, k<=7: "
            f"{_summary(tail)} against parity plus d<=rho; the parity-only statement misclassifies "
            f"{mismatches} cases with some d_l > rho_l, all {confirmed} confirmed impossible by brute force")
    return _record(3, literal, text)


def criterion_4():
    rep = run("factor_equiv", 4, 6)
    return _record(4, rep.ok, "split subset conditions vs combined vs flow, n<=4, k<=6, factor-stage "
                   "instances with and without tails: " + _summary(rep))


def criterion_5():
    rep = run("classical", 5, 5)
    return _record(5, rep.ok, "k=n, rho=(n,...,n) vs the classical symmetric embedding conditions, "
                   "n<=5, with and without tails: " + _summary(rep))


def criterion_6():
    rep = run("corollaries", 4, 6)
    fired = {name: rep.counters[f"fired_{name}"] for name in FAST_PATHS}
    silent = [name for name, count in fired.items() if count == 0]
    passed = rep.ok and not silent
    detail = ", ".join(f"{name}={count}" for name, count in fired.items())
    return _record(6, passed, f"fast paths vs full verdict, n<=4, k<=6: {_summary(rep)}; fired {detail}")


@lru_cache(maxsize=None)
def fuzz(count=10_000, seed=20261017):
    rng = random.Random(seed)
    before = DETACH_STATS["checked"], DETACH_STATS["failed"]
    bad = []
    for _ in range(count):
        inst = random_feasible_instance(8, 12, rng)
        out = complete(inst)
        r = inst.r
        ok = (isinstance(out, SymmetricSquare) and validate_square(out, inst.rho).valid
              and tuple(row[:r] for row in out.cells[:r]) == inst.square.block())
        if not ok:
            bad.append(inst)
    return bad, DETACH_STATS["checked"] - before[0], DETACH_STATS["failed"] - before[1]


def criterion_7():
    bad, _, _ = fuzz()
    return _record(7, not bad, f"10000 random feasible instances, n<=8, k<=12: {10_000 - len(bad)} completed, "
                   "validated and block-preserving")


def criterion_8():
    reports = [run("nodiag", 4, 6), run("diag", 4, 6), run("construct", 5, 7), run("construct_diag", 4, 7)]
    _, fuzz_checked, fuzz_failed = fuzz()
    checked = sum(r.counters["detach_checked"] for r in reports) + fuzz_checked
    failed = sum(r.counters["detach_failed"] + r.counters["internal_errors"] for r in reports) + fuzz_failed
    return _record(8, failed == 0 and checked > 0,
                   f"split postconditions asserted on {checked} detachments, {failed} failures")


def criterion_9():
    reports = [run("nodiag", 4, 6), run("diag", 4, 6)]
    checked = sum(r.counters["witnesses_checked"] for r in reports)
    invalid = sum(r.counters["witnesses_invalid"] for r in reports)
    return _record(9, invalid == 0 and checked > 0 and all(r.ok for r in reports),
                   f"{checked} flow witnesses re-evaluated independently, {invalid} fail to violate")


def test_criterion_1():
    assert criterion_1()


def test_criterion_2():
    assert criterion_2()


def test_criterion_3_constructors_on_implicit_domain():
    _, _, sound, mismatches, confirmed = criterion_3_parts()
    assert sound and mismatches == confirmed


@pytest.mark.xfail(strict=True, reason="parity alone misses d_l <= rho_l; see decisions ledger")
def test_criterion_3():
    assert criterion_3()


def test_criterion_4():
    assert criterion_4()


def test_criterion_5():
    assert criterion_5()


def test_criterion_6():
    assert criterion_6()


def test_criterion_7():
    assert criterion_7()


def test_criterion_8():
    assert criterion_8()


def test_criterion_9():
    assert criterion_9()


if __name__ == "__main__":
    results = [f() for f in (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                             criterion_6, criterion_7, criterion_8, criterion_9)]
    sys.exit(0 if all(results) else 1)
