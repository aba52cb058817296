"""Constructive completion of symmetric rho-latin rectangles.

Pipeline: choose which ``n - r`` missing symbols each filled row receives
(a degree-constrained subgraph of the missing-symbol graph), fix the
diagonal tail, collapse the ``n - r`` new rows into one amalgamated vertex
carrying colored edges, 1-loops and 2-loops, then split that vertex back
into ``n - r`` vertices one at a time.  Each split is an exact flow problem:
the new vertex takes one edge toward every existing vertex, one 1-loop and
``q - 1`` halves of 2-loops, all in distinct colors, and must take every
color whose degree at the amalgam equals the number of vertices still
folded into it.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass

from .conditions import Condition, ConditionVerdict, is_rho_admissible, is_rho_d_admissible
from .core import (
    EMPTY,
    InternalError,
    RhoInstance,
    RhoVector,
    StructuralError,
    SymmetricSquare,
    check_tail,
    count_occurrences,
    validate_square,
)
from .factor import build_gamma, diag_window, nodiag_window, solve_gf_factor
from .flow import BoundedFlow

log = logging.getLogger(__name__)

# number of detachments whose postconditions were checked, by outcome
DETACH_STATS: Counter = Counter()


@dataclass(frozen=True)
class AmalgamatedGraph:
    """The filled block plus one vertex standing for all ``p = n - r`` new rows.

    ``row_edges[i]`` are the colors on the ``p`` edges between the amalgam and
    row ``i``; ``loops[l-1]`` and ``two_loops[l-1]`` are color multiplicities
    of its 1-loops (future diagonal cells) and 2-loops (future cell pairs in
    the new block).
    """

    square: SymmetricSquare
    rho: RhoVector
    row_edges: tuple[tuple[int, ...], ...]
    loops: tuple[int, ...]
    two_loops: tuple[int, ...]

    @property
    def p(self) -> int:
        return self.rho.n - self.square.r

    def color_degree(self, sym: int) -> int:
        at_rows = sum(1 for colors in self.row_edges if sym in colors)
        return at_rows + self.loops[sym - 1] + 2 * self.two_loops[sym - 1]


@dataclass(frozen=True)
class DetachedGraph:
    """Result of splitting the amalgam into ``p`` vertices.

    Vertices are labelled ``0..n-1``: the filled rows keep their index and
    the split vertices become ``r..n-1``.  ``edges`` lists ``(u, v, color)``
    with ``u < v`` for ordinary edges and ``u == v`` for 1-loops, covering
    every edge incident to a split vertex.
    """

    amalgam: AmalgamatedGraph
    edges: tuple[tuple[int, int, int], ...]

    def to_square(self) -> SymmetricSquare:
        base = self.amalgam.square
        n = self.amalgam.rho.n
        cells = [list(row) for row in base.cells]
        for u, v, color in self.edges:
            cells[u][v] = cells[v][u] = color
        return SymmetricSquare(n, base.k, n, cells)


# -- diagonal tail -----------------------------------------------------------


def select_diagonal_tail(theta_degrees, e, rho, r: int, n: int) -> tuple[int, ...]:
    """Diagonal tail compatible with the chosen subgraph degrees.

    Odd ``rho - e`` symbols get one diagonal cell; the remaining
    ``(n - r - |odd|) / 2`` pairs go to symbols in ascending order, each up
    to ``floor((rho - e)/2) - theta_degree``.
    """
    k = len(rho)
    d = [(p - x) % 2 for p, x in zip(rho, e)]
    units = n - r - sum(d)
    if units < 0 or units % 2:
        raise InternalError("odd-symbol count incompatible with n - r (instance not admissible)")
    units //= 2
    slack = [(p - x) // 2 - t for p, x, t in zip(rho, e, theta_degrees)]
    if any(s < 0 for s in slack):
        raise InternalError("subgraph degree exceeds floor((rho - e)/2)")
    if sum(slack) < units:
        raise InternalError("not enough slack to place the diagonal tail")
    for idx in range(k):
        take = min(units, slack[idx])
        d[idx] += 2 * take
        units -= take
    d = tuple(d)
    _check_tail_choice(d, theta_degrees, e, rho, r, n)
    return d


def _check_tail_choice(d, theta_degrees, e, rho, r, n) -> None:
    if sum(d) != n - r:
        raise InternalError("diagonal tail does not sum to n - r")
    for p, x, t, dl in zip(rho, e, theta_degrees, d):
        if (dl - (p - x)) % 2 or dl < 0:
            raise InternalError("diagonal tail has the wrong parity")
        if 2 * t > p - x - dl:
            raise InternalError("diagonal tail leaves too little room for the subgraph")


# -- amalgam -------------------------------------------------------------------


def color_amalgam(square: SymmetricSquare, theta, d, rho: RhoVector) -> AmalgamatedGraph:
    n, r, k = rho.n, square.r, rho.k
    p = n - r
    e = count_occurrences(square)
    row_edges = [[] for _ in range(r)]
    theta_deg = [0] * k
    for i, sym in sorted(theta):
        row_edges[i].append(sym)
        theta_deg[sym - 1] += 1
    two = []
    for sym in range(1, k + 1):
        twice = rho[sym] - e[sym - 1] - d[sym - 1] - 2 * theta_deg[sym - 1]
        if twice < 0 or twice % 2:
            raise InternalError(f"2-loop multiplicity for color {sym} is {twice}/2")
        two.append(twice // 2)
    g = AmalgamatedGraph(square, rho, tuple(map(tuple, row_edges)), tuple(d), tuple(two))

    if any(len(colors) != p for colors in g.row_edges):
        raise InternalError("amalgam must have n - r edges to every filled row")
    if sum(g.loops) != p or sum(g.two_loops) != p * (p - 1) // 2:
        raise InternalError("amalgam loop counts do not match n - r")
    for i, colors in enumerate(g.row_edges):
        present = set(square.cells[i][:r])
        if len(set(colors)) != len(colors) or present & set(colors):
            raise InternalError(f"row {i} would see a color twice")
    for sym in range(1, k + 1):
        loops_sum = e[sym - 1] + g.loops[sym - 1] + 2 * (theta_deg[sym - 1] + g.two_loops[sym - 1])
        if loops_sum != rho[sym]:
            raise InternalError(f"color {sym} would occur {loops_sum} times, not rho={rho[sym]}")
        deg = g.color_degree(sym)
        if deg != rho[sym] - e[sym - 1] - theta_deg[sym - 1] or deg > p:
            raise InternalError(f"color {sym} has degree {deg} at the amalgam (limit {p})")
    return g


# -- detachment ---------------------------------------------------------------


def detach(g: AmalgamatedGraph, p: "int | None" = None) -> DetachedGraph:
    n, r, k = g.rho.n, g.square.r, g.rho.k
    if p is None:
        p = n - r
    if p != n - r:
        raise StructuralError(f"can only split the amalgam into n - r = {n - r} vertices")
    pending = [list(colors) for colors in g.row_edges]
    loops = list(g.loops)
    two = list(g.two_loops)
    edges = []
    for q in range(p, 0, -1):
        v = n - q
        chosen_rows, loop_color, halves = _split_off(pending, loops, two, q, k, g)
        for i, color in enumerate(chosen_rows):
            pending[i].remove(color)
            edges.append((i, v, color))
        loops[loop_color - 1] -= 1
        edges.append((v, v, loop_color))
        for color in halves:
            two[color - 1] -= 1
        pending.append(list(halves))
    if any(pending) or any(loops) or any(two):
        raise InternalError("detachment left edges on the amalgam")
    f = DetachedGraph(g, tuple(edges))
    check_detachment(g, f)
    return f


def _split_off(pending, loops, two, q, k, g):
    """Pick the edges the next split vertex takes from an amalgam of ``q`` vertices."""
    m = len(pending)
    degree = [loops[c] + 2 * two[c] for c in range(k)]
    for colors in pending:
        for c in colors:
            degree[c - 1] += 1
    if max(degree, default=0) > q:
        raise InternalError(f"a color has degree {max(degree)} > {q} at the amalgam")

    # nodes: 0 = s, 1..m row slots, m+1 loop slot, m+2 half-loop slot, then colors, t
    s, loop_slot, half_slot = 0, m + 1, m + 2
    color_node = m + 3
    t = color_node + k
    net = BoundedFlow(t + 1)
    for i in range(m):
        net.add_arc(s, 1 + i, 1, 1)
    net.add_arc(s, loop_slot, 1, 1)
    net.add_arc(s, half_slot, q - 1, q - 1)
    row_arcs = [[(c, net.add_arc(1 + i, color_node + c - 1, 0, 1)) for c in sorted(colors)]
                for i, colors in enumerate(pending)]
    loop_arcs = [(c, net.add_arc(loop_slot, color_node + c - 1, 0, 1))
                 for c in range(1, k + 1) if loops[c - 1]]
    half_arcs = [(c, net.add_arc(half_slot, color_node + c - 1, 0, 1))
                 for c in range(1, k + 1) if two[c - 1]]
    for c in range(1, k + 1):
        forced = 1 if degree[c - 1] == q else 0
        net.add_arc(color_node + c - 1, t, forced, 1)
    net.add_arc(t, s, 0, m + q + 1)
    if not net.solve():
        DETACH_STATS["failed"] += 1
        raise InternalError("no valid split exists; repro: " + _repro(g, pending, loops, two, q))
    chosen_rows = []
    for arcs in row_arcs:
        picked = [c for c, arc in arcs if net.flow_on(arc)]
        chosen_rows.append(picked[0])
    loop_color = next(c for c, arc in loop_arcs if net.flow_on(arc))
    halves = tuple(c for c, arc in half_arcs if net.flow_on(arc))
    return chosen_rows, loop_color, halves


def _repro(g, pending, loops, two, q) -> str:
    return json.dumps({
        "rho": list(g.rho.entries), "block": [list(row) for row in g.square.block()],
        "row_edges": [list(x) for x in g.row_edges], "loops": list(g.loops),
        "two_loops": list(g.two_loops), "pending": pending, "remaining_loops": loops,
        "remaining_two_loops": two, "q": q,
    }, sort_keys=True)


def check_detachment(g: AmalgamatedGraph, f: DetachedGraph) -> None:
    """Assert the split conditions for ``p = n - r`` and consistency with ``g``.

    Every split vertex sees each color at most once, has exactly one 1-loop,
    exactly one edge to every filled row and to every other split vertex;
    amalgamating the split vertices again gives back ``g``.
    """
    n, r, k = g.rho.n, g.square.r, g.rho.k
    new = range(r, n)
    loops_at = Counter()
    pair_count = Counter()
    colors_at = {v: Counter() for v in new}
    row_colors = [Counter() for _ in range(r)]
    loop_colors, half_colors = Counter(), Counter()
    for u, v, c in f.edges:
        if not 1 <= c <= k:
            raise InternalError(f"edge {u}-{v} has color {c}")
        if u == v:
            if u < r:
                raise InternalError("1-loop on a filled row")
            loops_at[u] += 1
            colors_at[u][c] += 1
            loop_colors[c] += 1
            continue
        if v < r:
            raise InternalError("edge between two filled rows")
        pair_count[(u, v)] += 1
        colors_at[v][c] += 1
        if u >= r:
            colors_at[u][c] += 1
            half_colors[c] += 1
        else:
            row_colors[u][c] += 1
    ok = True
    for v in new:
        ok &= all(x <= 1 for x in colors_at[v].values())  # (i)
        ok &= loops_at[v] == 1  # (ii)
        ok &= all(pair_count[(i, v)] == 1 for i in range(r))  # (iii)
        ok &= all(pair_count[(min(v, w), max(v, w))] == 1 for w in new if w != v)  # (iv)
    ok &= all(row_colors[i] == Counter(g.row_edges[i]) for i in range(r))
    ok &= all(loop_colors[c] == g.loops[c - 1] and half_colors[c] == g.two_loops[c - 1]
              for c in range(1, k + 1))
    if not ok:
        DETACH_STATS["failed"] += 1
        raise InternalError("detachment postconditions violated")
    DETACH_STATS["checked"] += 1


# -- end-to-end ------------------------------------------------------------------


def _finish(square, rho, theta, d) -> SymmetricSquare:
    amalgam = color_amalgam(square, theta, d, rho)
    out = detach(amalgam).to_square()
    report = validate_square(out, rho, d, square.r)
    if not report.valid:
        raise InternalError("completed square fails validation: " + "; ".join(report.violations))
    if tuple(row[: square.r] for row in out.cells[: square.r]) != square.block():
        raise InternalError("completion changed the filled block")
    return out


def complete(instance: RhoInstance) -> "SymmetricSquare | ConditionVerdict":
    """Complete without a prescribed diagonal tail, or say which condition fails."""
    if instance.tail is not None:
        raise StructuralError("instance has a prescribed tail; use complete_with_diagonal")
    rho, square = instance.rho, instance.square
    n, r = rho.n, square.r
    if r == n:
        return square
    e = count_occurrences(square)
    adm = is_rho_admissible(e, rho, r)
    if not adm:
        return adm
    gamma = build_gamma(square)
    factor = solve_gf_factor(gamma, nodiag_window(n, r, rho, e))
    if not factor.feasible:
        return ConditionVerdict(False, Condition.COMBINED, witness=factor.witness)
    theta_deg = factor.symbol_degrees(rho.k)
    d = select_diagonal_tail(theta_deg, e, rho, r, n)
    return _finish(square, rho, factor.theta, d)


def complete_with_diagonal(instance: RhoInstance) -> "SymmetricSquare | ConditionVerdict":
    """Complete with the prescribed diagonal tail (as a multiset on rows r..n-1)."""
    if instance.tail is None:
        raise StructuralError("instance has no prescribed tail")
    rho, square, d = instance.rho, instance.square, instance.tail
    n, r = rho.n, square.r
    e = count_occurrences(square)
    if r == n:
        return square
    adm = is_rho_d_admissible(e, rho, d, r)
    if not adm:
        return adm
    gamma = build_gamma(square)
    factor = solve_gf_factor(gamma, diag_window(n, r, rho, e, d))
    if not factor.feasible:
        return ConditionVerdict(False, Condition.COMBINED_TAIL, witness=factor.witness)
    return _finish(square, rho, factor.theta, d)


def solve(instance: RhoInstance) -> "SymmetricSquare | ConditionVerdict":
    if instance.tail is None:
        return complete(instance)
    return complete_with_diagonal(instance)


def _empty(n: int, k: int) -> SymmetricSquare:
    return SymmetricSquare(n, k, 0, [[EMPTY] * n for _ in range(n)])


def construct(n: int, k: int, rho) -> "SymmetricSquare | ConditionVerdict":
    """A symmetric rho-latin square of order n, if the odd-rho count allows one."""
    rho = rho if isinstance(rho, RhoVector) else RhoVector(tuple(rho), n)
    if rho.n != n or rho.k != k:
        raise StructuralError("rho does not match n and k")
    odd = sum(1 for p in rho if p % 2)
    if odd > n:
        return ConditionVerdict(False, Condition.ODD_COUNT)
    if (odd - n) % 2:
        return ConditionVerdict(False, Condition.ODD_PARITY)
    zeros = (0,) * k
    d = select_diagonal_tail(zeros, zeros, rho, 0, n)
    return _finish(_empty(n, k), rho, (), d)


def construct_with_diagonal(n: int, k: int, rho, d) -> "SymmetricSquare | ConditionVerdict":
    """A symmetric rho-latin square of order n whose diagonal holds multiset ``d``.

    Needs ``rho_l - d_l`` even and, implicitly, ``d_l <= rho_l``.
    """
    rho = rho if isinstance(rho, RhoVector) else RhoVector(tuple(rho), n)
    d = tuple(d)
    if rho.n != n or rho.k != k:
        raise StructuralError("rho does not match n and k")
    check_tail(d, k, n)
    for sym, (p, t) in enumerate(zip(rho, d), 1):
        if (p - t) % 2:
            return ConditionVerdict(False, Condition.PARITY_TAIL, symbol=sym)
    for sym, (p, t) in enumerate(zip(rho, d), 1):
        if t > p:
            return ConditionVerdict(False, Condition.ROWS_TAIL, symbol=sym,
                                    witness=(frozenset(), frozenset()))
    return _finish(_empty(n, k), rho, (), d)
