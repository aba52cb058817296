"""Necessary-and-sufficient conditions for completing symmetric rho-latin rectangles.

Everything here works from ``rho``, the occurrence vector ``e`` and the
"missing" counts of the filled block; nothing calls the flow solver, so these
checks serve as an independent route to the verdict.  Subset conditions are
evaluated exhaustively over every ``I`` of rows and ``K`` of symbols using
bitmask membership matrices (exact int64 arithmetic).

Condition labels are the equation labels of the source article, so that a
failing check can be looked up directly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import BudgetError, StructuralError, SymmetricSquare, check_tail, count_occurrences, monus


class Condition(str, enum.Enum):
    EXCESS = "easyneccon"
    ODD_COUNT = "congcon1"
    ODD_PARITY = "congcon2"
    EXCESS_TAIL = "easyneccondiag"
    PARITY_TAIL = "congcon1diag"
    ROWS = "longineqnodial1"
    SYMBOLS = "longineqnodial2"
    COMBINED = "reallylongineqnodial"
    ROWS_TAIL = "longineqdial1"
    SYMBOLS_TAIL = "longineqdial2"
    COMBINED_TAIL = "reallylongineqdial"
    FACTOR = "colorcon3nodiag"
    FACTOR_TAIL = "colorcon3"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ConditionVerdict:
    satisfied: bool
    condition: "Condition | None" = None
    symbol: "int | None" = None
    witness: "tuple[frozenset[int], frozenset[int]] | None" = None  # (rows I, symbols K)

    def __bool__(self):
        return self.satisfied

    def describe(self) -> str:
        if self.satisfied:
            return "satisfied"
        text = str(self.condition)
        if self.symbol is not None:
            text += f" at symbol {self.symbol}"
        if self.witness is not None:
            rows, syms = self.witness
            text += f" at I={_fmt(i + 1 for i in rows)}, K={_fmt(syms)}"
        return text


OK = ConditionVerdict(True)


def _fmt(items) -> str:
    return "{" + ",".join(str(x) for x in sorted(items)) + "}"


# -- admissibility -----------------------------------------------------------


def odd_symbols(rho, e) -> list[int]:
    return [s for s, (p, x) in enumerate(zip(rho, e), 1) if (p - x) % 2]


def is_nearly_rho_admissible(e, rho, r: int, n: "int | None" = None) -> ConditionVerdict:
    n = rho.n if n is None else n
    odd = len(odd_symbols(rho, e))
    if odd > n - r:
        return ConditionVerdict(False, Condition.ODD_COUNT)
    if (odd - (n - r)) % 2:
        return ConditionVerdict(False, Condition.ODD_PARITY)
    return OK


def is_rho_admissible(e, rho, r: int, n: "int | None" = None) -> ConditionVerdict:
    n = rho.n if n is None else n
    for s, (p, x) in enumerate(zip(rho, e), 1):
        if p - x > 2 * (n - r):
            return ConditionVerdict(False, Condition.EXCESS, symbol=s)
    return is_nearly_rho_admissible(e, rho, r, n)


def is_rho_d_admissible(e, rho, d, r: int, n: "int | None" = None) -> ConditionVerdict:
    n = rho.n if n is None else n
    check_tail(d, len(rho), n - r)
    for s, (p, x, t) in enumerate(zip(rho, e, d), 1):
        # parity is named first when a symbol breaks both
        if (p - x + t) % 2:
            return ConditionVerdict(False, Condition.PARITY_TAIL, symbol=s)
        if p - x + t > 2 * (n - r):
            return ConditionVerdict(False, Condition.EXCESS_TAIL, symbol=s)
    return OK


# -- subset conditions ---------------------------------------------------------

DEFAULT_MAX_ROWS = 12
DEFAULT_MAX_SYMBOLS = 16


@lru_cache(maxsize=None)
def subset_bits(m: int) -> np.ndarray:
    """``(2**m, m)`` 0/1 matrix; row ``b`` is the membership vector of bitmask ``b``."""
    masks = np.arange(1 << m, dtype=np.int64)[:, None]
    return ((masks >> np.arange(m, dtype=np.int64)) & 1).astype(np.int64)


def _mask_to_set(mask: int, offset: int = 0) -> frozenset[int]:
    return frozenset(b + offset for b in range(mask.bit_length()) if mask >> b & 1)


@dataclass
class SubsetData:
    """Per-instance numbers every subset condition is built from."""

    n: int
    r: int
    k: int
    missing: np.ndarray  # (r, k) 1 where symbol l is missing from row i
    upper: np.ndarray  # per-symbol upper bound: floor((rho-e)/2) or (rho-e-d)/2
    lower: np.ndarray  # per-symbol lower bound: rho - e + r monus n
    excess: np.ndarray = field(init=False)  # rho - e - n + r, untruncated

    @classmethod
    def build(cls, square: SymmetricSquare, rho, d=None) -> "SubsetData":
        n, r, k = rho.n, square.r, rho.k
        e = count_occurrences(square)
        missing = np.ones((r, k), dtype=np.int64)
        for i in range(r):
            for c in square.cells[i][:r]:
                missing[i, c - 1] = 0
        rho_a, e_a = np.array(rho.entries, dtype=np.int64), np.array(e, dtype=np.int64)
        if d is None:
            upper = (rho_a - e_a) // 2
        else:
            check_tail(d, k, n - r)
            diff = rho_a - e_a - np.array(d, dtype=np.int64)
            if np.any(diff % 2):
                raise StructuralError("rho - e - d is odd; the tail is not admissible")
            upper = diff // 2
        data = cls(n, r, k, missing, upper, np.maximum(rho_a - e_a + r - n, 0))
        data.excess = rho_a - e_a - n + r
        return data

    def check_budget(self, max_rows: int, max_symbols: int) -> None:
        if self.r > max_rows or self.k > max_symbols:
            raise BudgetError(
                f"subset enumeration over r={self.r} rows and k={self.k} symbols exceeds "
                f"the budget (r <= {max_rows}, k <= {max_symbols}); use the flow check"
            )

    def mu_rows_all(self) -> np.ndarray:
        """``(2**r, k)``: entry ``[I, l]`` is the number of rows of I missing l."""
        return subset_bits(self.r) @ self.missing

    def mu_symbols_all(self) -> np.ndarray:
        """``(2**k, r)``: entry ``[K, i]`` is the number of symbols of K missing from row i."""
        return subset_bits(self.k) @ self.missing.T


def _first_bad(values: np.ndarray) -> "int | None":
    bad = np.flatnonzero(values > 0)
    return int(bad[0]) if bad.size else None


def rows_condition(data: SubsetData, label: Condition) -> ConditionVerdict:
    """``(n-r)|I| <= sum_l min(upper_l, mu_I(l))`` for every I."""
    c = data.n - data.r
    bits = subset_bits(data.r)
    gap = c * bits.sum(axis=1) - np.minimum(data.upper[None, :], data.mu_rows_all()).sum(axis=1)
    bad = _first_bad(gap)
    if bad is None:
        return OK
    return ConditionVerdict(False, label, witness=(_mask_to_set(bad), frozenset()))


def symbols_condition(data: SubsetData, label: Condition) -> ConditionVerdict:
    """``sum_{l in K} (rho-e+r monus n) <= sum_i min(n-r, mu_K(i))`` for every K."""
    c = data.n - data.r
    bits = subset_bits(data.k)
    gap = bits @ data.lower - np.minimum(c, data.mu_symbols_all()).sum(axis=1)
    bad = _first_bad(gap)
    if bad is None:
        return OK
    return ConditionVerdict(False, label, witness=(frozenset(), _mask_to_set(bad, 1)))


def combined_deficits(data: SubsetData, row_masks: "np.ndarray | None" = None) -> np.ndarray:
    """``(len(row_masks), 2**k)`` right side minus left side of the combined inequality.

    Left: ``(n-r)(r-|I|) + sum_{l not in K} upper_l``.  Right:
    ``sum_{l in K} (excess_l monus mu_I(l)) + sum_{i in I} (n-r monus mu_K(i))``.
    """
    c = data.n - data.r
    ibits = subset_bits(data.r)
    mu_i = data.mu_rows_all()
    if row_masks is not None:
        ibits, mu_i = ibits[row_masks], mu_i[row_masks]
    kbits = subset_bits(data.k)
    lhs = (c * (data.r - ibits.sum(axis=1)))[:, None] + (data.upper.sum() - kbits @ data.upper)[None, :]
    rhs = np.maximum(data.excess[None, :] - mu_i, 0) @ kbits.T
    rhs += ibits @ np.maximum(c - data.mu_symbols_all(), 0).T
    return rhs - lhs


def combined_condition(data: SubsetData, label: Condition, chunk: int = 1 << 20) -> ConditionVerdict:
    rows_per_chunk = max(1, chunk >> data.k)
    total = 1 << data.r
    for start in range(0, total, rows_per_chunk):
        masks = np.arange(start, min(total, start + rows_per_chunk))
        deficit = combined_deficits(data, masks)
        bad = np.flatnonzero(deficit.ravel() > 0)
        if bad.size:
            i_idx, k_mask = divmod(int(bad[0]), 1 << data.k)
            witness = (_mask_to_set(int(masks[i_idx])), _mask_to_set(k_mask, 1))
            return ConditionVerdict(False, label, witness=witness)
    return OK


def combined_holds_at(square: SymmetricSquare, rho, rows, symbols, d=None) -> bool:
    """Evaluate the combined inequality at a single ``(I, K)`` straight from the square."""
    n, r, k = rho.n, square.r, rho.k
    e = count_occurrences(square)
    c = n - r
    present = [set(square.cells[i][:r]) for i in range(r)]
    rows, symbols = set(rows), set(symbols)

    def mu_i(sym):
        return sum(1 for i in rows if sym not in present[i])

    def mu_k(i):
        return sum(1 for sym in symbols if sym not in present[i])

    def half(sym):
        if d is None:
            return (rho[sym] - e[sym - 1]) // 2
        return (rho[sym] - e[sym - 1] - d[sym - 1]) // 2

    lhs = c * (r - len(rows)) + sum(half(s) for s in range(1, k + 1) if s not in symbols)
    rhs = sum(monus(rho[s] - e[s - 1] - n + r, mu_i(s)) for s in symbols)
    rhs += sum(monus(c, mu_k(i)) for i in rows)
    return lhs >= rhs


@dataclass(frozen=True)
class SubsetVerdicts:
    split: ConditionVerdict  # rows condition and symbols condition together
    combined: ConditionVerdict

    @property
    def agree(self) -> bool:
        return self.split.satisfied == self.combined.satisfied

    @property
    def satisfied(self) -> bool:
        if not self.agree:
            raise AssertionError(f"characterizations disagree: {self}")
        return self.split.satisfied


def _subset_conditions(data, labels, max_rows, max_symbols) -> SubsetVerdicts:
    data.check_budget(max_rows, max_symbols)
    rows_label, symbols_label, combined_label = labels
    split = rows_condition(data, rows_label)
    if split:
        split = symbols_condition(data, symbols_label)
    return SubsetVerdicts(split, combined_condition(data, combined_label))


def check_subset_conditions_nodiag(
    square: SymmetricSquare, rho, max_rows: int = DEFAULT_MAX_ROWS, max_symbols: int = DEFAULT_MAX_SYMBOLS
) -> SubsetVerdicts:
    data = SubsetData.build(square, rho)
    labels = (Condition.ROWS, Condition.SYMBOLS, Condition.COMBINED)
    return _subset_conditions(data, labels, max_rows, max_symbols)


def check_subset_conditions_diag(
    square: SymmetricSquare, rho, d, max_rows: int = DEFAULT_MAX_ROWS, max_symbols: int = DEFAULT_MAX_SYMBOLS
) -> SubsetVerdicts:
    data = SubsetData.build(square, rho, d)
    labels = (Condition.ROWS_TAIL, Condition.SYMBOLS_TAIL, Condition.COMBINED_TAIL)
    return _subset_conditions(data, labels, max_rows, max_symbols)


def theorem_verdict_by_subsets(square: SymmetricSquare, rho, d=None, **budget) -> ConditionVerdict:
    """Full verdict (admissibility, then the subset conditions) without any flow."""
    e = count_occurrences(square)
    if d is None:
        adm = is_rho_admissible(e, rho, square.r)
        if not adm or square.r == rho.n:
            return adm
        return check_subset_conditions_nodiag(square, rho, **budget).combined
    adm = is_rho_d_admissible(e, rho, d, square.r)
    if not adm or square.r == rho.n:
        return adm
    return check_subset_conditions_diag(square, rho, d, **budget).combined


# -- classical special cases (k = n, rho = (n,...,n)) -------------------------


def cruse_conditions(e, n: int, r: int) -> bool:
    """Symmetric latin rectangle embedding: e_l >= 2r - n and enough e_l = n (mod 2)."""
    if any(x < 2 * r - n for x in e):
        return False
    return sum(1 for x in e if (x - n) % 2 == 0) >= r


def andersen_hoffman_conditions(e, d, n: int, r: int) -> bool:
    """Prescribed-tail version: e_l >= 2r - n + d_l and e_l + d_l = n (mod 2)."""
    return all(x >= 2 * r - n + t and (x + t - n) % 2 == 0 for x, t in zip(e, d))


# -- cheaper sufficient-condition checks ------------------------------------


@dataclass(frozen=True)
class FastPath:
    name: str
    applicable: bool
    verdict: "bool | None" = None
    alternatives: tuple[bool, ...] = ()


def _parity_with_tail(rho, e, d) -> bool:
    return all((p + x + t) % 2 == 0 for p, x, t in zip(rho, e, d))


def _nearly(rho, e, r) -> bool:
    return is_nearly_rho_admissible(e, rho, r).satisfied


def _all_pairs_hold(data: SubsetData) -> bool:
    """``sum_{l in K} upper_l >= sum_{i in I} (n-r monus mu_{not K}(i))`` for all I, K."""
    c = data.n - data.r
    kbits = subset_bits(data.k)
    ibits = subset_bits(data.r)
    mu_complement = (1 - kbits) @ data.missing.T  # (2**k, r)
    rhs = ibits @ np.maximum(c - mu_complement, 0).T  # (2**r, 2**k)
    return bool(np.all((kbits @ data.upper)[None, :] >= rhs))


def _complement_rows_hold(data: SubsetData, use_complement: bool) -> bool:
    """``(n-r)|I| >= sum_l (excess_l monus mu_{not I}(l))``, or with I and its complement swapped."""
    c = data.n - data.r
    ibits = subset_bits(data.r)
    mu = (1 - ibits) @ data.missing if use_complement else ibits @ data.missing
    size = ibits.sum(axis=1) if use_complement else data.r - ibits.sum(axis=1)
    return bool(np.all(c * size >= np.maximum(data.excess[None, :] - mu, 0).sum(axis=1)))


def corollary_fastpaths(square: SymmetricSquare, rho, d=None, **budget) -> list[FastPath]:
    """Evaluate each sufficient-condition shortcut whose hypothesis holds.

    With a tail the ``tail_*`` shortcuts run, without one the ``free_*``
    ones.  ``*_lower_slack`` fires when no symbol has a lower degree bound,
    ``*_upper_slack`` when no upper bound can bind, ``*_no_bounds`` when both
    hold and ``*_proportional`` under the three product inequalities.  ``verdict`` is
    the shortcut's answer; ``alternatives`` lists every equivalent condition
    set the shortcut offers, evaluated separately.
    """
    n, r, k = rho.n, square.r, rho.k
    if r == n:
        return []
    e = count_occurrences(square)
    max_rows = budget.get("max_rows", DEFAULT_MAX_ROWS)
    max_symbols = budget.get("max_symbols", DEFAULT_MAX_SYMBOLS)

    def fired(name, base, *checks):
        # each check needs the subset data; skip them once the cheap part fails
        if not base:
            alts = (False,) * max(1, len(checks))
        elif not checks:
            alts = (True,)
        else:
            sd = SubsetData.build(square, rho, d)
            sd.check_budget(max_rows, max_symbols)
            alts = tuple(bool(check(sd)) for check in checks)
        return FastPath(name, True, alts[0], alts)

    hyp_low = all(x >= r - n + p for p, x in zip(rho, e))
    out = []
    if d is not None:
        check_tail(d, k, n - r)
        parity = _parity_with_tail(rho, e, d)
        tops = [p - x - t for p, x, t in zip(rho, e, d)]
        hypotheses = {
            "tail_lower_slack": hyp_low,
            "tail_upper_slack": all(x >= 2 * r + t - p for p, x, t in zip(rho, e, d)),
            "tail_no_bounds": all(2 * r + t - x <= p <= n - r + x for p, x, t in zip(rho, e, d)),
            "tail_proportional": _proportional_hypotheses(n, r, k, rho, e, tops, scale=2),
        }
        checks = {
            "tail_lower_slack": (_all_pairs_hold, lambda sd: rows_condition(sd, Condition.ROWS_TAIL)),
            "tail_upper_slack": (lambda sd: _complement_rows_hold(sd, True),
                    lambda sd: symbols_condition(sd, Condition.SYMBOLS_TAIL)),
            "tail_no_bounds": (),
            "tail_proportional": (),
        }
        base = parity
    else:
        floors = [(p - x) // 2 for p, x in zip(rho, e)]
        hyp_half = all(h >= r - x for h, x in zip(floors, e))
        hypotheses = {
            "free_lower_slack": hyp_low,
            "free_upper_slack": hyp_half,
            "free_no_bounds": hyp_low and hyp_half,
            "free_proportional": _proportional_hypotheses(n, r, k, rho, e, floors, scale=1),
        }
        checks = {
            "free_lower_slack": (_all_pairs_hold, lambda sd: rows_condition(sd, Condition.ROWS)),
            "free_upper_slack": (lambda sd: symbols_condition(sd, Condition.SYMBOLS),
                    lambda sd: _complement_rows_hold(sd, False)),
            "free_no_bounds": (),
            "free_proportional": (),
        }
        base = _nearly(rho, e, r)
    for name, holds in hypotheses.items():
        out.append(fired(name, base, *checks[name]) if holds else FastPath(name, False))
    return out


def _proportional_hypotheses(n, r, k, rho, e, tops, scale: int) -> bool:
    """The three product inequalities.

    ``tops`` is ``rho - e - d`` (scale 2) or ``floor((rho - e)/2)`` (scale 1),
    so ``tops / scale`` is the per-symbol upper bound in both cases.
    """
    excess = [p - x - n + r for p, x in zip(rho, e)]
    gaps = [r - x for x in e]
    for gap, top, exc in zip(gaps, tops, excess):
        if (n - r) * gap < (k - r) * exc:
            return False
        if (k - r) * top < scale * (n - r) * gap:
            return False
    return all(
        gaps[a] * tops[b] >= scale * gaps[b] * excess[a]
        for a in range(len(gaps))
        for b in range(len(gaps))
    )
