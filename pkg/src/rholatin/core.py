"""Domain types and bookkeeping for symmetric rho-latin squares.

Rows and columns are 0-based; symbols are the integers ``1..k``.  Empty cells
hold :data:`EMPTY` (``None``), never ``0``.  Vectors indexed by symbol
(``rho``, ``e``, ``d``) are tuples of length ``k`` where position ``l - 1``
belongs to symbol ``l``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

EMPTY = None

Grid = tuple[tuple["int | None", ...], ...]
OccurrenceVector = tuple[int, ...]
DiagonalTail = tuple[int, ...]


class StructuralError(ValueError):
    """Malformed input: dimension mismatch, out-of-range symbol, bad tail, ..."""


class BudgetError(RuntimeError):
    """A configured work budget was exceeded; distinct from infeasibility."""


class InternalError(AssertionError):
    """A postcondition the theory guarantees did not hold."""


def monus(x: int, y: int) -> int:
    """Truncated subtraction ``max(0, x - y)``."""
    return x - y if x > y else 0


@dataclass(frozen=True)
class RhoVector:
    entries: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        n, k = self.n, len(self.entries)
        if n < 1 or k < 1:
            raise StructuralError("n and k must be positive")
        if n > k:
            raise StructuralError(f"need n <= k, got n={n}, k={k}")
        for sym, target in enumerate(self.entries, 1):
            if not 1 <= target <= n:
                raise StructuralError(f"rho_{sym}={target} outside [1, {n}]")
        if sum(self.entries) != n * n:
            raise StructuralError(f"sum of rho is {sum(self.entries)}, expected n^2={n * n}")

    @property
    def k(self) -> int:
        return len(self.entries)

    def __getitem__(self, sym: int) -> int:
        return self.entries[sym - 1]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def _freeze(rows: Sequence[Sequence["int | None"]]) -> Grid:
    return tuple(tuple(EMPTY if c is None else int(c) for c in row) for row in rows)


@dataclass(frozen=True)
class SymmetricSquare:
    """An ``n x n`` symmetric array whose top-left ``r x r`` block is filled.

    Construction enforces symmetry, the block shape and the latin property,
    so every instance is a symmetric rho-latin rectangle up to the per-symbol
    budget (which depends on rho and is checked by :class:`RhoInstance`).
    """

    n: int
    k: int
    r: int
    cells: Grid = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "cells", _freeze(self.cells))
        problems = _structure_problems(self.cells, self.n, self.k, self.r)
        if problems:
            raise StructuralError("; ".join(problems[:5]))

    @classmethod
    def from_block(cls, block: Sequence[Sequence[int]], n: int, k: int) -> "SymmetricSquare":
        r = len(block)
        cells = [[EMPTY] * n for _ in range(n)]
        for i, row in enumerate(block):
            if len(row) != r:
                raise StructuralError(f"block row {i} has length {len(row)}, expected {r}")
            cells[i][:r] = row
        return cls(n, k, r, cells)

    @classmethod
    def full(cls, rows: Sequence[Sequence[int]], k: int) -> "SymmetricSquare":
        return cls(len(rows), k, len(rows), rows)

    @property
    def is_full(self) -> bool:
        return self.r == self.n

    def block(self) -> Grid:
        return tuple(row[: self.r] for row in self.cells[: self.r])

    def row_symbols(self, i: int) -> frozenset[int]:
        return frozenset(c for c in self.cells[i] if c is not EMPTY)

    def diagonal(self) -> tuple["int | None", ...]:
        return tuple(self.cells[i][i] for i in range(self.n))

    def to_lists(self, empty=0) -> list[list[int]]:
        return [[empty if c is EMPTY else c for c in row] for row in self.cells]

    def __str__(self):
        width = len(str(self.k))
        return "\n".join(
            " ".join("." * width if c is EMPTY else str(c).rjust(width) for c in row)
            for row in self.cells
        )


def _structure_problems(cells: Grid, n: int, k: int, r: int) -> list[str]:
    if n < 1 or k < 1:
        return [f"n={n} and k={k} must be positive"]
    if not 0 <= r <= n:
        return [f"r={r} outside [0, {n}]"]
    if len(cells) != n or any(len(row) != n for row in cells):
        return [f"grid is not {n}x{n}"]
    problems = []
    for i in range(n):
        for j in range(n):
            c = cells[i][j]
            inside = i < r and j < r
            if inside and c is EMPTY:
                problems.append(f"cell ({i + 1},{j + 1}) inside the {r}x{r} block is empty")
            elif not inside and c is not EMPTY:
                problems.append(f"cell ({i + 1},{j + 1}) outside the {r}x{r} block is filled")
            elif c is not EMPTY and not 1 <= c <= k:
                problems.append(f"cell ({i + 1},{j + 1}) holds {c}, not a symbol in [1,{k}]")
            if j > i and c != cells[j][i]:
                problems.append(f"cells ({i + 1},{j + 1}) and ({j + 1},{i + 1}) differ")
    problems.extend(_latin_problems(cells))
    return problems


def _latin_problems(cells: Sequence[Sequence["int | None"]]) -> list[str]:
    problems = []
    for label, lines in (("row", cells), ("column", list(zip(*cells)))):
        for i, line in enumerate(lines):
            seen = set()
            for c in line:
                if c is EMPTY:
                    continue
                if c in seen:
                    problems.append(f"symbol {c} repeated in {label} {i + 1}")
                seen.add(c)
    return problems


@dataclass(frozen=True)
class RhoInstance:
    """A completion problem: targets ``rho``, the partial square, optional tail."""

    rho: RhoVector
    square: SymmetricSquare
    tail: "DiagonalTail | None" = None

    def __post_init__(self):
        rho, sq = self.rho, self.square
        if sq.n != rho.n or sq.k != rho.k:
            raise StructuralError(
                f"square is n={sq.n}, k={sq.k} but rho is n={rho.n}, k={rho.k}"
            )
        e = count_occurrences(sq)
        for sym, (have, want) in enumerate(zip(e, rho), 1):
            if have > want:
                raise StructuralError(f"symbol {sym} occurs {have} times, more than rho={want}")
        if self.tail is not None:
            object.__setattr__(self, "tail", tuple(int(x) for x in self.tail))
            check_tail(self.tail, rho.k, sq.n - sq.r)

    @property
    def n(self) -> int:
        return self.rho.n

    @property
    def k(self) -> int:
        return self.rho.k

    @property
    def r(self) -> int:
        return self.square.r

    def occurrences(self) -> OccurrenceVector:
        return count_occurrences(self.square)

    def without_tail(self) -> "RhoInstance":
        return RhoInstance(self.rho, self.square)

    def with_tail(self, tail: Iterable[int]) -> "RhoInstance":
        return RhoInstance(self.rho, self.square, tuple(tail))


def check_tail(d: Sequence[int], k: int, size: int) -> None:
    if len(d) != k:
        raise StructuralError(f"diagonal tail has {len(d)} entries, expected k={k}")
    if any(x < 0 for x in d):
        raise StructuralError("diagonal tail entries must be non-negative")
    if sum(d) != size:
        raise StructuralError(f"diagonal tail sums to {sum(d)}, expected n-r={size}")


def count_occurrences(square: SymmetricSquare) -> OccurrenceVector:
    e = [0] * square.k
    for row in square.cells[: square.r]:
        for c in row[: square.r]:
            e[c - 1] += 1
    return tuple(e)


def tail_of(square: SymmetricSquare, r: int) -> DiagonalTail:
    """Diagonal tail of a full square below the top-left ``r x r`` block."""
    d = [0] * square.k
    for i in range(r, square.n):
        d[square.cells[i][i] - 1] += 1
    return tuple(d)


def _check_row(square: SymmetricSquare, i: int) -> None:
    if not 0 <= i < square.r:
        raise StructuralError(f"row {i} is not a filled row (r={square.r})")


def _check_symbol(square: SymmetricSquare, sym: int) -> None:
    if not 1 <= sym <= square.k:
        raise StructuralError(f"{sym} is not a symbol in [1,{square.k}]")


def mu_rows(square: SymmetricSquare, rows: Iterable[int], sym: int) -> int:
    """Number of rows in ``rows`` (filled rows) where ``sym`` is missing."""
    _check_symbol(square, sym)
    total = 0
    for i in rows:
        _check_row(square, i)
        if sym not in square.cells[i][: square.r]:
            total += 1
    return total


def mu_symbols(square: SymmetricSquare, i: int, symbols: Iterable[int]) -> int:
    """Number of symbols in ``symbols`` missing from filled row ``i``."""
    _check_row(square, i)
    present = set(square.cells[i][: square.r])
    total = 0
    for sym in symbols:
        _check_symbol(square, sym)
        if sym not in present:
            total += 1
    return total


@dataclass
class ValidationReport:
    valid: bool
    violations: list[str]

    def __bool__(self):
        return self.valid


def validate_square(
    square: "SymmetricSquare | Sequence[Sequence[int]]",
    rho: RhoVector,
    tail: "DiagonalTail | None" = None,
    r: int = 0,
) -> ValidationReport:
    """Check a full square against rho (and the diagonal tail below row ``r``).

    Accepts raw row lists as well, so that broken arrays can be diagnosed
    instead of being rejected at construction time.  The tail is compared as a
    multiset over the diagonal cells ``r..n-1``.
    """
    cells = square.cells if isinstance(square, SymmetricSquare) else _freeze(square)
    n, k = rho.n, rho.k
    if isinstance(square, SymmetricSquare) and square.k != k:
        raise StructuralError(f"square has k={square.k}, rho has k={k}")
    if len(cells) != n or any(len(row) != n for row in cells):
        raise StructuralError(f"square is not {n}x{n}")
    if tail is not None:
        if not 0 <= r <= n:
            raise StructuralError(f"r={r} outside [0, {n}]")
        check_tail(tail, k, n - r)

    violations = []
    counts = [0] * k
    for i in range(n):
        for j in range(n):
            c = cells[i][j]
            if c is EMPTY or not isinstance(c, int) or not 1 <= c <= k:
                violations.append(f"cell ({i + 1},{j + 1}) holds {c!r}, not a symbol in [1,{k}]")
                continue
            counts[c - 1] += 1
            if j > i and c != cells[j][i]:
                violations.append(f"cells ({i + 1},{j + 1}) and ({j + 1},{i + 1}) differ")
    violations.extend(_latin_problems(cells))
    for sym in range(1, k + 1):
        if counts[sym - 1] != rho[sym]:
            violations.append(f"symbol {sym} occurs {counts[sym - 1]} times, rho={rho[sym]}")
    if tail is not None:
        got = [0] * k
        for i in range(r, n):
            c = cells[i][i]
            if isinstance(c, int) and 1 <= c <= k:
                got[c - 1] += 1
        for sym in range(1, k + 1):
            if got[sym - 1] != tail[sym - 1]:
                violations.append(
                    f"symbol {sym} occurs {got[sym - 1]} times on the diagonal tail, "
                    f"expected {tail[sym - 1]}"
                )
    return ValidationReport(not violations, violations)
