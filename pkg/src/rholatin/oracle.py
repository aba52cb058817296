"""Ground truth by exhaustive search, instance enumeration and cross-validation."""

from __future__ import annotations

import itertools
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator

from .conditions import (
    Condition,
    andersen_hoffman_conditions,
    check_subset_conditions_diag,
    check_subset_conditions_nodiag,
    combined_holds_at,
    corollary_fastpaths,
    cruse_conditions,
    is_rho_admissible,
    is_rho_d_admissible,
)
from .completion import DETACH_STATS, complete, complete_with_diagonal, construct, construct_with_diagonal
from .core import (
    EMPTY,
    BudgetError,
    InternalError,
    RhoInstance,
    RhoVector,
    SymmetricSquare,
    count_occurrences,
    validate_square,
)
from .factor import build_gamma, diag_window, nodiag_window, solve_gf_factor
from .io import instance_to_json

DEFAULT_NODE_BUDGET = 2_000_000


def brute_force_complete(instance: RhoInstance, node_budget: int = DEFAULT_NODE_BUDGET) -> "SymmetricSquare | None":
    """Some completion of ``instance`` (tail honoured as a multiset), or None.

    Plain backtracking over the unfilled upper triangle in row-major order,
    symbols ascending.  Raises :class:`BudgetError` past ``node_budget`` nodes.
    """
    rho, sq, tail = instance.rho, instance.square, instance.tail
    n, k, r = rho.n, rho.k, sq.r
    cells = [list(row) for row in sq.cells]
    if r == n:
        return sq
    e = count_occurrences(sq)
    remaining = [p - x for p, x in zip(rho, e)]
    used = [0] * n
    for i in range(r):
        for c in cells[i][:r]:
            used[i] |= 1 << c
    diag_left = list(tail) if tail is not None else None
    if diag_left is not None and any((a - b) % 2 or a < b for a, b in zip(remaining, diag_left)):
        return None  # every off-diagonal symbol is placed twice
    todo = [(i, j) for i in range(n) for j in range(i, n) if not (i < r and j < r)]
    diag_cells_after = [0] * (len(todo) + 1)
    for t in range(len(todo) - 1, -1, -1):
        i, j = todo[t]
        diag_cells_after[t] = diag_cells_after[t + 1] + (i == j)
    odd = sum(x % 2 for x in remaining)
    nodes = 0

    def search(t: int, odd: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetError(f"brute-force search exceeded {node_budget} nodes")
        if t == len(todo):
            return True
        if diag_left is None and odd > diag_cells_after[t]:
            return False
        i, j = todo[t]
        blocked = used[i] | used[j]
        for s in range(1, k + 1):
            if blocked >> s & 1:
                continue
            if i == j:
                if remaining[s - 1] < 1 or (diag_left is not None and diag_left[s - 1] < 1):
                    continue
                remaining[s - 1] -= 1
                if diag_left is not None:
                    diag_left[s - 1] -= 1
                used[i] |= 1 << s
                cells[i][i] = s
                step = -1 if remaining[s - 1] % 2 == 0 else 1
                if search(t + 1, odd + step):
                    return True
                used[i] &= ~(1 << s)
                remaining[s - 1] += 1
                if diag_left is not None:
                    diag_left[s - 1] += 1
            else:
                if remaining[s - 1] < 2:
                    continue
                remaining[s - 1] -= 2
                used[i] |= 1 << s
                used[j] |= 1 << s
                cells[i][j] = cells[j][i] = s
                if search(t + 1, odd):
                    return True
                used[i] &= ~(1 << s)
                used[j] &= ~(1 << s)
                remaining[s - 1] += 2
            cells[i][j] = cells[j][i] = EMPTY
        return False

    if not search(0, odd):
        return None
    out = SymmetricSquare(n, k, n, cells)
    report = validate_square(out, rho, tail, r)
    assert report.valid, report.violations
    return out


# -- enumeration -----------------------------------------------------------------


def compositions(total: int, parts: int, lo: int, hi: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` integers in ``[lo, hi]`` summing to ``total``, lexicographic."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for x in range(lo, hi + 1):
        rest = total - x
        if lo * (parts - 1) <= rest <= hi * (parts - 1):
            for tail in compositions(rest, parts - 1, lo, hi):
                yield (x,) + tail


@lru_cache(maxsize=None)
def symmetric_blocks(r: int, k: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Every symmetric ``r x r`` array over ``1..k`` with no repeat in a row or column."""
    slots = [(i, j) for i in range(r) for j in range(i, r)]
    grid = [[0] * r for _ in range(r)]
    used = [0] * r
    out = []

    def fill(t):
        if t == len(slots):
            out.append(tuple(tuple(row) for row in grid))
            return
        i, j = slots[t]
        blocked = used[i] | used[j]
        for s in range(1, k + 1):
            if blocked >> s & 1:
                continue
            grid[i][j] = grid[j][i] = s
            used[i] |= 1 << s
            used[j] |= 1 << s
            fill(t + 1)
            used[i] &= ~(1 << s)
            used[j] &= ~(1 << s)
        grid[i][j] = grid[j][i] = 0

    fill(0)
    return tuple(out)


@lru_cache(maxsize=None)
def _squares_for(n: int, k: int, r: int):
    out = []
    for block in symmetric_blocks(r, k):
        sq = SymmetricSquare.from_block(block, n, k)
        out.append((sq, count_occurrences(sq)))
    return tuple(out)


def enumerate_instances(
    n_max: int,
    k_max: int,
    filter: "Callable[[RhoInstance], bool] | None" = None,
    tails: bool = False,
    n_min: int = 1,
    r_values: "Iterator[int] | None" = None,
    rho_filter: "Callable[[RhoVector], bool] | None" = None,
) -> Iterator[RhoInstance]:
    """Every instance up to the bounds, in a fixed order.

    For each ``n``, ``k`` (``n <= k <= k_max``), rho, ``r`` (``0..n``) and
    symmetric ``r x r`` block with ``e <= rho``; with ``tails=True`` each is
    repeated for every tail ``d >= 0`` summing to ``n - r``.
    """
    for n in range(n_min, n_max + 1):
        for k in range(n, k_max + 1):
            for entries in compositions(n * n, k, 1, n):
                rho = RhoVector(entries, n)
                if rho_filter is not None and not rho_filter(rho):
                    continue
                rs = range(n + 1) if r_values is None else [r for r in r_values if r <= n]
                for r in rs:
                    tail_list = list(compositions(n - r, k, 0, n - r)) if tails else [None]
                    for sq, e in _squares_for(n, k, r):
                        if any(x > p for x, p in zip(e, entries)):
                            continue
                        for d in tail_list:
                            inst = RhoInstance(rho, sq, d)
                            if filter is None or filter(inst):
                                yield inst


# -- random instances ------------------------------------------------------------


def random_symmetric_latin(n: int, rng: random.Random) -> list[list[int]]:
    """A random symmetric latin square on ``1..n`` by randomized backtracking."""
    while True:
        grid = [[0] * n for _ in range(n)]
        used = [set() for _ in range(n)]
        slots = [(i, j) for i in range(n) for j in range(i, n)]
        budget = [20000]

        def fill(t):
            if t == len(slots):
                return True
            budget[0] -= 1
            if budget[0] < 0:
                return False
            i, j = slots[t]
            options = [s for s in range(1, n + 1) if s not in used[i] and s not in used[j]]
            rng.shuffle(options)
            for s in options:
                grid[i][j] = grid[j][i] = s
                used[i].add(s)
                used[j].add(s)
                if fill(t + 1):
                    return True
                used[i].discard(s)
                used[j].discard(s)
            grid[i][j] = grid[j][i] = 0
            return False

        if fill(0):
            return grid


def random_full_square(n: int, k: int, rng: random.Random) -> tuple[SymmetricSquare, RhoVector]:
    """Random symmetric rho-latin square using all of ``1..k``.

    Starts from a random symmetric latin square and hands part of some
    symbol's cells (a diagonal cell or a mirrored pair counts as one slot) to
    each extra symbol, which keeps the latin property.
    """
    if not n <= k <= n * (n + 1) // 2:
        raise ValueError(f"k={k} must lie in [n, n(n+1)/2]")
    grid = random_symmetric_latin(n, rng)
    slots: dict[int, list[tuple[int, int]]] = {}
    for i in range(n):
        for j in range(i, n):
            slots.setdefault(grid[i][j], []).append((i, j))
    for new in range(n + 1, k + 1):
        donors = [s for s, cells in slots.items() if len(cells) >= 2]
        donor = rng.choice(sorted(donors))
        cells = slots[donor]
        rng.shuffle(cells)
        take = rng.randint(1, len(cells) - 1)
        slots[new], slots[donor] = cells[:take], cells[take:]
    perm = list(range(1, k + 1))
    rng.shuffle(perm)
    for sym, cells in slots.items():
        for i, j in cells:
            grid[i][j] = grid[j][i] = perm[sym - 1]
    sq = SymmetricSquare.full(grid, k)
    return sq, RhoVector(count_occurrences(sq), n)


def random_feasible_instance(n_max: int, k_max: int, rng: random.Random) -> RhoInstance:
    """Erase a random full square down to its top-left ``r x r`` block."""
    n = rng.randint(1, n_max)
    k = rng.randint(n, min(k_max, n * (n + 1) // 2))
    full, rho = random_full_square(n, k, rng)
    r = rng.randint(0, n)
    block = [list(row[:r]) for row in full.cells[:r]]
    return RhoInstance(rho, SymmetricSquare.from_block(block, n, k))


# -- cross-validation ----------------------------------------------------------------

MODES = ("nodiag", "diag", "construct", "construct_diag", "corollaries", "factor_equiv", "classical")


@dataclass
class CrosscheckReport:
    mode: str
    instances_tested: int = 0
    agreements: int = 0
    disagreements: list = field(default_factory=list)
    elapsed: float = 0.0
    complete: bool = True
    counters: Counter = field(default_factory=Counter)

    @property
    def ok(self) -> bool:
        return self.complete and not self.disagreements and self.agreements == self.instances_tested

    def record(self, agree: bool, dump: "dict | None" = None) -> None:
        self.instances_tested += 1
        if agree:
            self.agreements += 1
        else:
            self.disagreements.append(dump)

    def merge(self, other: "CrosscheckReport") -> "CrosscheckReport":
        return CrosscheckReport(
            self.mode,
            self.instances_tested + other.instances_tested,
            self.agreements + other.agreements,
            self.disagreements + other.disagreements,
            max(self.elapsed, other.elapsed),
            self.complete and other.complete,
            self.counters + other.counters,
        )

    def to_json(self) -> dict:
        # elapsed time stays out so that reports are byte-identical across runs
        return {
            "mode": self.mode,
            "instances_tested": self.instances_tested,
            "agreements": self.agreements,
            "disagreements": self.disagreements,
            "complete": self.complete,
            "counters": dict(sorted(self.counters.items())),
        }


def _dump(inst: RhoInstance, **verdicts) -> dict:
    return {"instance": instance_to_json(inst), **{k: repr(v) for k, v in verdicts.items()}}


def _verdict_outcome(inst: RhoInstance, report: CrosscheckReport):
    """Run the pipeline; returns (succeeded, verdict), checking flow witnesses on the way."""
    out = complete(inst) if inst.tail is None else complete_with_diagonal(inst)
    if isinstance(out, SymmetricSquare):
        report.counters["completed"] += 1
        return True, out
    if out.condition in (Condition.COMBINED, Condition.COMBINED_TAIL):
        report.counters["witnesses_checked"] += 1
        if combined_holds_at(inst.square, inst.rho, *out.witness, d=inst.tail):
            report.counters["witnesses_invalid"] += 1
            return False, ("invalid witness", out)
    return False, out


def _check_completion_instance(inst, report, node_budget):
    ok, verdict = _verdict_outcome(inst, report)
    found = brute_force_complete(inst, node_budget) is not None
    agree = ok == found and not (isinstance(verdict, tuple))
    report.record(agree, None if agree else _dump(inst, verdict=verdict, oracle=found))


def _check_factor_equiv(inst, report):
    rho, sq, d = inst.rho, inst.square, inst.tail
    e = count_occurrences(sq)
    n, r = rho.n, sq.r
    adm = is_rho_admissible(e, rho, r) if d is None else is_rho_d_admissible(e, rho, d, r)
    if not adm or r == n:
        return
    if d is None:
        subsets = check_subset_conditions_nodiag(sq, rho)
        window = nodiag_window(n, r, rho, e)
    else:
        subsets = check_subset_conditions_diag(sq, rho, d)
        window = diag_window(n, r, rho, e, d)
    flow = solve_gf_factor(build_gamma(sq), window).feasible
    agree = subsets.split.satisfied == subsets.combined.satisfied == flow
    report.counters["feasible" if flow else "infeasible"] += 1
    report.record(agree, None if agree else _dump(inst, split=subsets.split,
                                                    combined=subsets.combined, flow=flow))


def _check_corollaries(inst, report):
    if inst.r == inst.n:
        return
    paths = corollary_fastpaths(inst.square, inst.rho, inst.tail)
    fired = [p for p in paths if p.applicable]
    if not fired:
        return
    ok, _ = _verdict_outcome(inst, report)
    agree = True
    for p in fired:
        report.counters[f"fired_{p.name}"] += 1
        if any(alt != ok for alt in p.alternatives):
            report.counters[f"wrong_{p.name}"] += 1
            agree = False
    report.record(agree, None if agree else _dump(inst, verdict=ok, fastpaths=fired))


def _check_classical(inst, report):
    rho, sq, d = inst.rho, inst.square, inst.tail
    n, r = rho.n, sq.r
    e = count_occurrences(sq)
    ok, _ = _verdict_outcome(inst, report)
    if d is None:
        classical = cruse_conditions(e, n, r)
    else:
        classical = andersen_hoffman_conditions(e, d, n, r)
    report.record(ok == classical, None if ok == classical else _dump(inst, verdict=ok, classical=classical))


def _construct_cases(n_max, k_max, with_tail):
    for n in range(1, n_max + 1):
        for k in range(n, k_max + 1):
            for entries in compositions(n * n, k, 1, n):
                if not with_tail:
                    yield n, k, entries, None
                else:
                    for d in compositions(n, k, 0, n):
                        yield n, k, entries, d


def _check_construct(n, k, entries, d, report, oracle_n_max, node_budget):
    rho = RhoVector(entries, n)
    if d is None:
        odd = sum(p % 2 for p in entries)
        quoted = odd <= n and (odd - n) % 2 == 0
        out = construct(n, k, rho)
        implicit = quoted
    else:
        quoted = all((p - t) % 2 == 0 for p, t in zip(entries, d))
        implicit = quoted and all(t <= p for p, t in zip(entries, d))
        if quoted and not implicit:
            report.counters["parity_holds_but_tail_exceeds_rho"] += 1
        out = construct_with_diagonal(n, k, rho, d)
    built = isinstance(out, SymmetricSquare)
    valid = not built or validate_square(out, rho, d, 0).valid
    agree = built == implicit and valid
    oracle = None
    if n <= oracle_n_max:
        empty = SymmetricSquare(n, k, 0, [[EMPTY] * n for _ in range(n)])
        oracle = brute_force_complete(RhoInstance(rho, empty, d), node_budget) is not None
        agree &= oracle == built
        report.counters["oracle_checked"] += 1
        if quoted and not implicit and not oracle:
            report.counters["tail_exceeds_rho_confirmed_infeasible"] += 1
    report.counters["built" if built else "refused"] += 1
    dump = None
    if not agree:
        dump = {"n": n, "k": k, "rho": list(entries), "diagonal": d and list(d),
                "built": built, "quoted": quoted, "oracle": oracle}
    report.record(agree, dump)


def crosscheck(
    n_max: int,
    k_max: int,
    mode: str,
    *,
    shard: int = 0,
    shards: int = 1,
    n_min: int = 1,
    sample: "int | None" = None,
    seed: int = 0,
    node_budget: int = DEFAULT_NODE_BUDGET,
    oracle_n_max: int = 4,
    time_budget: "float | None" = None,
) -> CrosscheckReport:
    """Compare the package verdicts against ground truth for every enumerated case.

    ``shard``/``shards`` split the stream round-robin.  ``sample`` keeps a
    seeded random subset of that many cases instead of all of them.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    report = CrosscheckReport(mode)
    start = time.perf_counter()
    detach_before = Counter(DETACH_STATS)
    if mode in ("construct", "construct_diag"):
        cases = _construct_cases(n_max, k_max, mode == "construct_diag")
        cases = (c for c in cases if c[0] >= n_min)
    else:
        cases = _instance_stream(mode, n_max, k_max, n_min)
    if sample is not None:
        cases = _sample(cases, sample, random.Random(seed))
    try:
        for idx, case in enumerate(cases):
            if idx % shards != shard:
                continue
            if time_budget is not None and time.perf_counter() - start > time_budget:
                report.complete = False
                break
            try:
                _CHECKS[mode](case, report, oracle_n_max, node_budget)
            except InternalError as exc:
                report.counters["internal_errors"] += 1
                dump = {"internal_error": str(exc)}
                if isinstance(case, RhoInstance):
                    dump["instance"] = instance_to_json(case)
                else:
                    dump["case"] = [list(x) if isinstance(x, tuple) else x for x in case]
                report.record(False, dump)
    except BudgetError as exc:
        report.complete = False
        report.counters["budget_errors"] += 1
        report.disagreements.append({"budget_error": str(exc)})
    for key in ("checked", "failed"):
        report.counters[f"detach_{key}"] += DETACH_STATS[key] - detach_before[key]
    report.elapsed = time.perf_counter() - start
    return report


_CHECKS = {
    "construct": lambda case, rep, nmax, budget: _check_construct(*case, rep, nmax, budget),
    "construct_diag": lambda case, rep, nmax, budget: _check_construct(*case, rep, nmax, budget),
    "nodiag": lambda case, rep, nmax, budget: _check_completion_instance(case, rep, budget),
    "diag": lambda case, rep, nmax, budget: _check_completion_instance(case, rep, budget),
    "factor_equiv": lambda case, rep, nmax, budget: _check_factor_equiv(case, rep),
    "corollaries": lambda case, rep, nmax, budget: _check_corollaries(case, rep),
    "classical": lambda case, rep, nmax, budget: _check_classical(case, rep),
}


def _instance_stream(mode, n_max, k_max, n_min):
    if mode == "nodiag":
        return enumerate_instances(n_max, k_max, n_min=n_min)
    if mode == "diag":
        return enumerate_instances(n_max, k_max, tails=True, n_min=n_min)
    if mode == "classical":
        latin = lambda rho: rho.k == rho.n and all(p == rho.n for p in rho)  # noqa: E731
        return itertools.chain(
            enumerate_instances(n_max, k_max, n_min=n_min, rho_filter=latin),
            enumerate_instances(n_max, k_max, tails=True, n_min=n_min, rho_filter=latin),
        )
    return itertools.chain(
        enumerate_instances(n_max, k_max, n_min=n_min),
        enumerate_instances(n_max, k_max, tails=True, n_min=n_min),
    )


def _sample(cases, size, rng):
    """Reservoir sample of ``size`` cases, returned in stream order."""
    keep = []
    for idx, case in enumerate(cases):
        if len(keep) < size:
            keep.append((idx, case))
        else:
            j = rng.randint(0, idx)
            if j < size:
                keep[j] = (idx, case)
    keep.sort(key=lambda pair: pair[0])
    return (case for _, case in keep)
