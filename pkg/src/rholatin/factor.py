"""The missing-symbol bigraph and its degree-constrained subgraph.

Rows of the filled block sit on one side, symbols on the other; row ``i`` is
joined to symbol ``l`` when ``l`` is missing from row ``i``.  A completion
exists exactly when this graph has a subgraph in which every row has degree
``n - r`` and every symbol stays inside its window ``[g, f]``; the window is
decided with a lower-bounded flow.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import InternalError, SymmetricSquare, StructuralError, count_occurrences, monus
from .flow import BoundedFlow


@dataclass(frozen=True)
class MissingBigraph:
    r: int
    k: int
    missing: tuple[tuple[int, ...], ...]  # missing[i]: ascending symbols absent from row i

    def edges(self):
        for i, syms in enumerate(self.missing):
            for sym in syms:
                yield i, sym

    def row_degree(self, i: int) -> int:
        return len(self.missing[i])

    def symbol_degrees(self) -> tuple[int, ...]:
        deg = [0] * self.k
        for syms in self.missing:
            for sym in syms:
                deg[sym - 1] += 1
        return tuple(deg)

    def mu_rows(self, rows, sym: int) -> int:
        return sum(1 for i in rows if sym in self.missing[i])

    def mu_symbols(self, i: int, symbols) -> int:
        row = self.missing[i]
        return sum(1 for sym in symbols if sym in row)


@dataclass(frozen=True)
class DegreeWindow:
    row_g: tuple[int, ...]
    row_f: tuple[int, ...]
    g: tuple[int, ...]  # per symbol, index l - 1
    f: tuple[int, ...]


@dataclass(frozen=True)
class FactorResult:
    theta: "tuple[tuple[int, int], ...] | None" = None
    witness: "tuple[frozenset[int], frozenset[int]] | None" = None

    @property
    def feasible(self) -> bool:
        return self.theta is not None

    def symbol_degrees(self, k: int) -> tuple[int, ...]:
        deg = [0] * k
        for _, sym in self.theta:
            deg[sym - 1] += 1
        return tuple(deg)


def build_gamma(square: SymmetricSquare, k: "int | None" = None) -> MissingBigraph:
    k = square.k if k is None else k
    r = square.r
    missing = []
    for i in range(r):
        present = set(square.cells[i][:r])
        missing.append(tuple(s for s in range(1, k + 1) if s not in present))
    gamma = MissingBigraph(r, k, tuple(missing))
    e = count_occurrences(square)
    if any(len(m) != k - r for m in missing):
        raise InternalError("row degree of the missing-symbol graph differs from k - r")
    if gamma.symbol_degrees() != tuple(r - x for x in e):
        raise InternalError("symbol degree of the missing-symbol graph differs from r - e")
    return gamma


def nodiag_window(n: int, r: int, rho, e) -> DegreeWindow:
    c = n - r
    g = tuple(monus(p - x + r, n) for p, x in zip(rho, e))
    f = tuple((p - x) // 2 for p, x in zip(rho, e))
    return DegreeWindow((c,) * r, (c,) * r, g, f)


def diag_window(n: int, r: int, rho, e, d) -> DegreeWindow:
    c = n - r
    g = tuple(monus(p - x + r, n) for p, x in zip(rho, e))
    f = []
    for p, x, t in zip(rho, e, d):
        if (p - x - t) % 2:
            raise StructuralError("rho - e - d must be even for a prescribed tail")
        f.append((p - x - t) // 2)
    return DegreeWindow((c,) * r, (c,) * r, g, tuple(f))


def deficiency(gamma: MissingBigraph, window: DegreeWindow, rows, symbols) -> int:
    """Right side minus left side of the combined (g,f)-factor inequality at (I, K).

    ``f(rows outside I) + f(symbols outside K) >= sum over K of g - mu_I
    (truncated) + sum over I of g - mu_K (truncated)``.  A positive value
    means the inequality fails at ``(rows, symbols)``.
    """
    rows, symbols = set(rows), set(symbols)
    lhs = sum(window.row_f[i] for i in range(gamma.r) if i not in rows)
    lhs += sum(window.f[s - 1] for s in range(1, gamma.k + 1) if s not in symbols)
    rhs = sum(monus(window.g[s - 1], gamma.mu_rows(rows, s)) for s in symbols)
    rhs += sum(monus(window.row_g[i], gamma.mu_symbols(i, symbols)) for i in rows)
    return rhs - lhs


def solve_gf_factor(gamma: MissingBigraph, window: DegreeWindow) -> FactorResult:
    r, k = gamma.r, gamma.k
    everything = frozenset(range(r))
    if any(x < 0 for x in window.f):
        witness = (everything, frozenset(s for s in range(1, k + 1) if window.f[s - 1] >= 0))
        return _checked_witness(gamma, window, witness)
    for lo, hi in zip(window.row_g + window.g, window.row_f + window.f):
        if lo > hi:
            raise StructuralError(f"degree window has g={lo} > f={hi}")

    # nodes: 0 = s, 1..r rows, r+1..r+k symbols, r+k+1 = t
    s, t = 0, r + k + 1
    net = BoundedFlow(r + k + 2)
    for i in range(r):
        net.add_arc(s, 1 + i, window.row_g[i], window.row_f[i])
    edge_arcs = []
    for i, sym in gamma.edges():
        edge_arcs.append((i, sym, net.add_arc(1 + i, r + sym, 0, 1)))
    for sym in range(1, k + 1):
        net.add_arc(r + sym, t, window.g[sym - 1], window.f[sym - 1])
    net.add_arc(t, s, 0, sum(window.row_f) + sum(window.f) + 1)

    if net.solve():
        theta = tuple((i, sym) for i, sym, arc in edge_arcs if net.flow_on(arc))
        _check_theta(gamma, window, theta)
        return FactorResult(theta=theta)

    cut = net.violated_set
    if net.cut_imbalance(cut) <= 0:
        raise InternalError("residual cut does not violate the circulation condition")
    rows_in = frozenset(i for i in range(r) if 1 + i in cut)
    syms_in = frozenset(sym for sym in range(1, k + 1) if r + sym in cut)
    if s in cut and t in cut:
        witness = (rows_in, frozenset(range(1, k + 1)))
    elif s not in cut and t not in cut:
        witness = (everything, frozenset(range(1, k + 1)) - syms_in)
    else:
        raise InternalError("violated cut separates the source from the sink")
    return _checked_witness(gamma, window, witness)


def _checked_witness(gamma, window, witness) -> FactorResult:
    if deficiency(gamma, window, *witness) <= 0:
        raise InternalError(f"derived witness {witness} does not violate the factor inequality")
    return FactorResult(witness=witness)


def _check_theta(gamma: MissingBigraph, window: DegreeWindow, theta) -> None:
    if len(set(theta)) != len(theta):
        raise InternalError("factor is not simple")
    row_deg = [0] * gamma.r
    sym_deg = [0] * gamma.k
    for i, sym in theta:
        if sym not in gamma.missing[i]:
            raise InternalError(f"factor edge ({i}, {sym}) is not in the missing-symbol graph")
        row_deg[i] += 1
        sym_deg[sym - 1] += 1
    for i in range(gamma.r):
        if not window.row_g[i] <= row_deg[i] <= window.row_f[i]:
            raise InternalError(f"row {i} has factor degree {row_deg[i]} outside its window")
    for sym in range(1, gamma.k + 1):
        if not window.g[sym - 1] <= sym_deg[sym - 1] <= window.f[sym - 1]:
            raise InternalError(f"symbol {sym} has factor degree outside its window")
    if len(theta) != sum(window.row_g) and window.row_g == window.row_f:
        raise InternalError("factor edge count differs from the row demand")
