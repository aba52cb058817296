import random

import pytest
from hypothesis import given, settings, strategies as st

from rholatin import (
    Condition,
    ConditionVerdict,
    RhoInstance,
    RhoVector,
    StructuralError,
    SymmetricSquare,
    complete,
    complete_with_diagonal,
    construct,
    construct_with_diagonal,
    solve,
    validate_square,
)
from rholatin.completion import DETACH_STATS, color_amalgam, detach, select_diagonal_tail
from rholatin.core import EMPTY, count_occurrences, tail_of
from rholatin.factor import build_gamma, diag_window, nodiag_window, solve_gf_factor
from rholatin.oracle import brute_force_complete, random_feasible_instance, random_full_square

RHO4 = RhoVector((4, 4, 4, 4), 4)
BLOCK = SymmetricSquare.from_block([[1, 2], [2, 1]], 4, 4)


def _top_left(square, r):
    return tuple(row[:r] for row in square.cells[:r])


def _theta(square, rho):
    e = count_occurrences(square)
    return solve_gf_factor(build_gamma(square), nodiag_window(rho.n, square.r, rho, e)).theta


def test_tail_selection_running_example():
    d = select_diagonal_tail((0, 0, 2, 2), (2, 2, 0, 0), RHO4, 2, 4)
    assert d == (2, 0, 0, 0)
    # the three required properties, checked directly
    assert sum(d) == 2
    assert all((x - (p - e)) % 2 == 0 for x, p, e in zip(d, RHO4, (2, 2, 0, 0)))
    assert all(2 * t <= p - e - x for t, p, e, x in zip((0, 0, 2, 2), RHO4, (2, 2, 0, 0), d))


def test_tail_selection_forced_by_odd_symbols():
    rho = RhoVector((1, 2, 2, 2, 2), 3)
    assert select_diagonal_tail((0,) * 5, (0,) * 5, rho, 2, 3) == (1, 0, 0, 0, 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).map(lambda h: 2 * h), st.integers(0, 10**6))
def test_tail_selection_from_scratch_even_rho(n, seed):
    rng = random.Random(seed)
    _, rho = random_full_square(n, n, rng)
    if any(p % 2 for p in rho):
        return
    zeros = (0,) * rho.k
    d = select_diagonal_tail(zeros, zeros, rho, 0, n)
    assert sum(d) == n and all(x % 2 == 0 for x in d)


def test_amalgam_running_example():
    theta = _theta(BLOCK, RHO4)
    g = color_amalgam(BLOCK, theta, (2, 0, 0, 0), RHO4)
    assert g.loops == (2, 0, 0, 0)
    assert g.two_loops == (0, 1, 0, 0)
    assert sum(g.two_loops) == 1  # C(2, 2)


def test_amalgam_single_new_row_has_no_two_loops():
    full, rho = random_full_square(5, 7, random.Random(4))
    block = [list(row[:4]) for row in full.cells[:4]]
    sq = SymmetricSquare.from_block(block, 5, 7)
    d = tail_of(full, 4)
    e = count_occurrences(sq)
    theta = solve_gf_factor(build_gamma(sq), diag_window(5, 4, rho, e, d)).theta
    g = color_amalgam(sq, theta, d, rho)
    assert g.two_loops == (0,) * 7


def test_detach_running_example_gives_expected_square():
    theta = _theta(BLOCK, RHO4)
    out = detach(color_amalgam(BLOCK, theta, (2, 0, 0, 0), RHO4)).to_square()
    assert validate_square(out, RHO4, (2, 0, 0, 0), 2)
    assert out.to_lists() == [[1, 2, 3, 4], [2, 1, 4, 3], [3, 4, 1, 2], [4, 3, 2, 1]]


def test_detach_rejects_other_p():
    g = color_amalgam(BLOCK, _theta(BLOCK, RHO4), (2, 0, 0, 0), RHO4)
    with pytest.raises(StructuralError):
        detach(g, p=3)


def test_detach_single_vertex_is_identity():
    sq = SymmetricSquare.from_block([[1, 2], [2, 3]], 3, 3)
    rho = RhoVector((3, 3, 3), 3)
    theta = _theta(sq, rho)
    degrees = tuple(sum(1 for _, s in theta if s == sym) for sym in (1, 2, 3))
    d = select_diagonal_tail(degrees, (1, 2, 1), rho, 2, 3)
    out = detach(color_amalgam(sq, theta, d, rho))
    assert len(out.edges) == 3 and sum(1 for u, v, _ in out.edges if u == v) == 1
    assert out.to_square().to_lists() == [[1, 2, 3], [2, 3, 1], [3, 1, 2]]


def test_full_degree_color_reaches_every_split_vertex():
    out = construct(4, 4, RHO4)
    # each symbol has degree p = 4 at the single-vertex amalgam
    for sym in range(1, 5):
        assert all(sym in row for row in out.cells)


def test_complete_running_example():
    out = complete(RhoInstance(RHO4, BLOCK))
    assert isinstance(out, SymmetricSquare) and validate_square(out, RHO4)
    assert _top_left(out, 2) == BLOCK.block()


def test_complete_full_square_is_returned():
    full = SymmetricSquare.full([[1, 2], [2, 1]], 2)
    assert complete(RhoInstance(RhoVector((2, 2), 2), full)) is full


def test_complete_reports_admissibility_failure():
    out = complete(RhoInstance(RhoVector((3, 3, 3), 3), SymmetricSquare.from_block([[1, 2], [2, 1]], 3, 3)))
    assert isinstance(out, ConditionVerdict) and out.condition is Condition.EXCESS


def test_complete_rejects_tail_and_vice_versa():
    with pytest.raises(StructuralError):
        complete(RhoInstance(RHO4, BLOCK, (2, 0, 0, 0)))
    with pytest.raises(StructuralError):
        complete_with_diagonal(RhoInstance(RHO4, BLOCK))


def test_prescribed_tail_never_falls_back():
    inst = RhoInstance(RHO4, BLOCK, (1, 1, 0, 0))
    out = solve(inst)
    assert isinstance(out, ConditionVerdict) and out.condition is Condition.PARITY_TAIL
    assert isinstance(solve(inst.without_tail()), SymmetricSquare)


def test_complete_with_diagonal_r0_matches_constructor():
    rho = RhoVector((2, 1, 1), 2)
    empty = SymmetricSquare(2, 3, 0, [[EMPTY] * 2] * 2)
    a = complete_with_diagonal(RhoInstance(rho, empty, (0, 1, 1)))
    b = construct_with_diagonal(2, 3, rho, (0, 1, 1))
    assert a == b


def test_construct_examples():
    out = construct(2, 3, (2, 1, 1))
    assert validate_square(out, RhoVector((2, 1, 1), 2))
    # the only order-2 squares for this rho have symbol 1 off the diagonal
    assert out.to_lists() in ([[2, 1], [1, 3]], [[3, 1], [1, 2]])
    assert construct(2, 4, (1, 1, 1, 1)).condition is Condition.ODD_COUNT
    assert construct(1, 1, (1,)).to_lists() == [[1]]


def test_construct_with_diagonal_examples():
    out = construct_with_diagonal(2, 3, (2, 1, 1), (0, 1, 1))
    assert out.to_lists() in ([[2, 1], [1, 3]], [[3, 1], [1, 2]])
    assert construct_with_diagonal(1, 1, (1,), (1,)).to_lists() == [[1]]
    verdict = construct_with_diagonal(2, 3, (2, 1, 1), (1, 1, 0))
    assert verdict.condition is Condition.PARITY_TAIL and verdict.symbol == 1
    with pytest.raises(StructuralError):
        construct_with_diagonal(2, 3, (2, 1, 1), (1, 0, 0))


def test_parity_alone_is_not_enough_for_a_prescribed_diagonal():
    # rho - d is even everywhere, but symbol 1 would need three diagonal cells and occurs once
    rho = RhoVector((1, 2, 2, 2, 2), 3)
    d = (3, 0, 0, 0, 0)
    assert all((p - t) % 2 == 0 for p, t in zip(rho, d))
    empty = SymmetricSquare(3, 5, 0, [[EMPTY] * 3] * 3)
    assert brute_force_complete(RhoInstance(rho, empty, d)) is None
    verdict = construct_with_diagonal(3, 5, rho, d)
    assert isinstance(verdict, ConditionVerdict) and verdict.condition is Condition.ROWS_TAIL


def test_detach_stats_count_calls():
    before = DETACH_STATS["checked"]
    construct(3, 3, (3, 3, 3))
    assert DETACH_STATS["checked"] == before + 1


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**9))
def test_random_feasible_instances_complete(seed):
    rng = random.Random(seed)
    inst = random_feasible_instance(8, 12, rng)
    out = complete(inst)
    assert isinstance(out, SymmetricSquare)
    assert validate_square(out, inst.rho)
    assert _top_left(out, inst.r) == inst.square.block()


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9))
def test_random_tails_taken_from_a_known_square_complete(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 7)
    k = rng.randint(n, min(10, n * (n + 1) // 2))
    full, rho = random_full_square(n, k, rng)
    r = rng.randint(0, n)
    block = [list(row[:r]) for row in full.cells[:r]]
    inst = RhoInstance(rho, SymmetricSquare.from_block(block, n, k), tail_of(full, r))
    out = complete_with_diagonal(inst)
    assert isinstance(out, SymmetricSquare)
    assert validate_square(out, rho, inst.tail, r)
