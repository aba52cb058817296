import itertools

import pytest

from rholatin import RhoInstance, RhoVector, SymmetricSquare

# filled by the acceptance tests, printed once at the end of the session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def naive_is_rho_latin(rows, rho):
    """Independent check straight from the definition, no shared code."""
    n = len(rows)
    for i in range(n):
        for j in range(n):
            if rows[i][j] != rows[j][i]:
                return False
        if len(set(rows[i])) != n:
            return False
    flat = [c for row in rows for c in row]
    return all(flat.count(sym) == target for sym, target in enumerate(rho, 1))


def all_full_squares(n, k):
    """Every symmetric n x n array over 1..k, generated from its upper triangle."""
    slots = [(i, j) for i in range(n) for j in range(i, n)]
    for values in itertools.product(range(1, k + 1), repeat=len(slots)):
        rows = [[0] * n for _ in range(n)]
        for (i, j), v in zip(slots, values):
            rows[i][j] = rows[j][i] = v
        yield rows


@pytest.fixture
def running_example():
    rho = RhoVector((4, 4, 4, 4), 4)
    return RhoInstance(rho, SymmetricSquare.from_block([[1, 2], [2, 1]], 4, 4))
