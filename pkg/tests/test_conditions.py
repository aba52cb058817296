import random

import pytest

from rholatin.conditions import (
    Condition,
    ConditionVerdict,
    SubsetData,
    check_subset_conditions_diag,
    check_subset_conditions_nodiag,
    combined_holds_at,
    corollary_fastpaths,
    cruse_conditions,
    is_nearly_rho_admissible,
    is_rho_admissible,
    is_rho_d_admissible,
    theorem_verdict_by_subsets,
)
from rholatin.core import BudgetError, RhoInstance, RhoVector, StructuralError, SymmetricSquare, count_occurrences, monus
from rholatin.oracle import brute_force_complete, enumerate_instances, random_feasible_instance

RHO4 = RhoVector((4, 4, 4, 4), 4)
BLOCK = SymmetricSquare.from_block([[1, 2], [2, 1]], 4, 4)


def test_running_example_is_admissible_and_completable():
    e = count_occurrences(BLOCK)
    assert is_rho_admissible(e, RHO4, 2)
    assert brute_force_complete(RhoInstance(RHO4, BLOCK)) is not None


def test_full_square_is_admissible():
    assert is_rho_admissible((4, 4, 4, 4), RHO4, 4)


def test_odd_count_overflow():
    verdict = is_rho_admissible((0, 0, 0, 0), RhoVector((1, 1, 1, 1), 2), 0)
    assert verdict.condition is Condition.ODD_COUNT and verdict.describe() == "congcon1"


def test_excess_names_the_symbol():
    # symbol 3 needs 3 copies but only 2(n-r) = 2 cells remain for it
    sq = SymmetricSquare.from_block([[1, 2], [2, 1]], 3, 3)
    verdict = is_rho_admissible(count_occurrences(sq), RhoVector((3, 3, 3), 3), 2)
    assert not verdict and verdict.condition is Condition.EXCESS and verdict.symbol == 3
    assert verdict.describe() == "easyneccon at symbol 3"


@pytest.mark.parametrize(
    "d, condition, symbol",
    [
        ((0, 0, 1, 1), Condition.PARITY_TAIL, 3),
        ((1, 1, 0, 0), Condition.PARITY_TAIL, 1),
        ((0, 0, 2, 0), Condition.EXCESS_TAIL, 3),
        ((2, 0, 0, 0), None, None),
    ],
)
def test_tail_admissibility(d, condition, symbol):
    verdict = is_rho_d_admissible((2, 2, 0, 0), RHO4, d, 2)
    assert verdict.satisfied == (condition is None)
    assert verdict.condition is condition and verdict.symbol == symbol


def test_tail_sum_mismatch_is_structural():
    with pytest.raises(StructuralError):
        is_rho_d_admissible((2, 2, 0, 0), RHO4, (1, 0, 0, 0), 2)


def test_subset_conditions_on_running_example():
    verdicts = check_subset_conditions_nodiag(BLOCK, RHO4)
    assert verdicts.agree and verdicts.satisfied
    tail = (2, 0, 0, 0)
    verdicts = check_subset_conditions_diag(BLOCK, RHO4, tail)
    found = brute_force_complete(RhoInstance(RHO4, BLOCK, tail)) is not None
    assert verdicts.agree and verdicts.satisfied == found is True


def test_empty_sets_always_hold():
    assert combined_holds_at(BLOCK, RHO4, frozenset(), frozenset())
    assert combined_holds_at(BLOCK, RHO4, frozenset(), frozenset(), d=(2, 0, 0, 0))


def test_subset_budget_refusal():
    with pytest.raises(BudgetError):
        check_subset_conditions_nodiag(BLOCK, RHO4, max_rows=1)


def test_odd_tail_half_is_rejected():
    with pytest.raises(StructuralError):
        SubsetData.build(BLOCK, RHO4, (1, 1, 0, 0))


def _naive_combined(square, rho, d=None):
    """Direct double loop over all (I, K) with Python sets; shares no code with the numpy path."""
    n, r, k = rho.n, square.r, rho.k
    e = count_occurrences(square)
    c = n - r
    rows = [set(square.cells[i][:r]) for i in range(r)]
    for imask in range(1 << r):
        I = [i for i in range(r) if imask >> i & 1]
        for kmask in range(1 << k):
            K = [s for s in range(1, k + 1) if kmask >> (s - 1) & 1]
            upper = lambda s: (rho[s] - e[s - 1]) // 2 if d is None else (rho[s] - e[s - 1] - d[s - 1]) // 2  # noqa: E731
            lhs = c * (r - len(I)) + sum(upper(s) for s in range(1, k + 1) if s not in K)
            rhs = sum(monus(rho[s] - e[s - 1] - n + r, sum(1 for i in I if s not in rows[i])) for s in K)
            rhs += sum(monus(c, sum(1 for s in K if s not in rows[i])) for i in I)
            if lhs < rhs:
                return False
    return True


def test_subset_conditions_match_oracle_and_naive_loop_n3():
    count = 0
    for inst in enumerate_instances(3, 5):
        if inst.r == inst.n:
            continue
        e = count_occurrences(inst.square)
        if not is_rho_admissible(e, inst.rho, inst.r):
            continue
        verdicts = check_subset_conditions_nodiag(inst.square, inst.rho)
        assert verdicts.agree
        assert verdicts.satisfied == _naive_combined(inst.square, inst.rho)
        assert verdicts.satisfied == (brute_force_complete(inst) is not None)
        count += 1
    assert count > 100


def test_diag_reduces_to_parity_when_r_is_zero():
    # with nothing filled, the full verdict must equal tail parity plus d <= rho
    for inst in enumerate_instances(3, 5, tails=True, r_values=[0]):
        verdict = theorem_verdict_by_subsets(inst.square, inst.rho, inst.tail)
        implicit = all((p - t) % 2 == 0 and t <= p for p, t in zip(inst.rho, inst.tail))
        assert verdict.satisfied == implicit
        assert verdict.satisfied == (brute_force_complete(inst) is not None)


def test_witness_reevaluates_as_violation():
    for inst in enumerate_instances(3, 5, tails=True):
        if inst.r == inst.n:
            continue
        e = count_occurrences(inst.square)
        if not is_rho_d_admissible(e, inst.rho, inst.tail, inst.r):
            continue
        verdicts = check_subset_conditions_diag(inst.square, inst.rho, inst.tail)
        if not verdicts.combined:
            rows, syms = verdicts.combined.witness
            assert not combined_holds_at(inst.square, inst.rho, rows, syms, d=inst.tail)


def test_nearly_admissible_is_implied():
    for inst in enumerate_instances(3, 4):
        e = count_occurrences(inst.square)
        if is_rho_admissible(e, inst.rho, inst.r):
            assert is_nearly_rho_admissible(e, inst.rho, inst.r)


def test_describe_formats_witness_one_based():
    verdict = ConditionVerdict(False, Condition.COMBINED, witness=(frozenset({0}), frozenset({3, 4})))
    assert verdict.describe() == "reallylongineqnodial at I={1}, K={3,4}"


def test_empty_rectangle_fast_path_checks_only_parity():
    for entries in [(2, 1, 1), (1, 1, 1, 1)]:
        rho = RhoVector(entries, 2)
        sq = SymmetricSquare(2, rho.k, 0, [[None] * 2] * 2)
        paths = {p.name: p for p in corollary_fastpaths(sq, rho)}
        assert paths["free_no_bounds"].applicable
        assert paths["free_no_bounds"].verdict == bool(is_nearly_rho_admissible((0,) * rho.k, rho, 0))


def test_cruse_specialization_fires_fast_path():
    # order 4, rho = (4,4,4,4): every 2x2 block with e >= 2r - n
    for inst in enumerate_instances(4, 4, n_min=4, r_values=[2]):
        e = count_occurrences(inst.square)
        if any(x < 2 * inst.r - inst.n for x in e):
            continue
        paths = {p.name: p for p in corollary_fastpaths(inst.square, inst.rho)}
        assert paths["free_proportional"].applicable
        assert paths["free_proportional"].verdict == cruse_conditions(e, inst.n, inst.r)


def test_fast_paths_never_contradict_full_verdict_on_random_instances():
    rng = random.Random(11)
    for _ in range(200):
        inst = random_feasible_instance(6, 9, rng)
        for path in corollary_fastpaths(inst.square, inst.rho):
            if path.applicable:
                assert all(path.alternatives), path
