"""Exact linear algebra over Q and over normal-form fraction fields."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Optional, TypeVar

T = TypeVar("T")


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (matrix, pivot column indices)."""
    m = [list(map(Fraction, r)) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def nullspace(rows: list[list[Fraction]], ncols: Optional[int] = None) -> list[list[Fraction]]:
    """Basis of the right nullspace, one vector per free column."""
    if not rows:
        if ncols is None:
            return []
        return [[Fraction(i == j) for j in range(ncols)] for i in range(ncols)]
    ncols = len(rows[0])
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(v)
    return basis


def solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> Optional[list[Fraction]]:
    """One solution of A x = b, or None if inconsistent."""
    aug = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    ncols = len(rows[0])
    m, pivots = rref(aug)
    for r in range(len(m)):
        if all(m[r][c] == 0 for c in range(ncols)) and m[r][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        if pc == ncols:
            return None
        x[pc] = m[r][ncols]
    return x


def rank(rows: list[list[Fraction]]) -> int:
    if not rows:
        return 0
    _, pivots = rref(rows)
    return len(pivots)


def mat_mul(a: list[list[Fraction]], b: list[list[Fraction]]) -> list[list[Fraction]]:
    n, k, m = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(k)), Fraction(0)) for j in range(m)] for i in range(n)]


def mat_identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(i == j) for j in range(n)] for i in range(n)]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, c: Fraction):
    return [[x * c for x in row] for row in a]


def mat_is_zero(a) -> bool:
    return all(x == 0 for row in a for x in row)


# ---------------------------------------------------------------------------
# generic field elimination (used with normal-form entries)
# ---------------------------------------------------------------------------


def solve_field(
    rows: list[list[T]],
    rhs: list[T],
    is_zero: Callable[[T], bool],
    add: Callable[[T, T], T],
    neg: Callable[[T], T],
    mul: Callable[[T, T], T],
    inv: Callable[[T], T],
) -> Optional[list[T]]:
    """Gaussian elimination over an arbitrary field; one solution or None.

    Requires the system to determine every unknown (used for shape fits
    where the solution must be unique).
    """
    nrows = len(rows)
    ncols = len(rows[0])
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if not is_zero(m[i][c])), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        scale = inv(m[r][c])
        m[r] = [mul(scale, x) for x in m[r]]
        for i in range(nrows):
            if i != r and not is_zero(m[i][c]):
                f = neg(m[i][c])
                m[i] = [add(x, mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append((r, c))
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if not is_zero(m[i][ncols]):
            return None
    if len(pivots) != ncols:
        return None
    x: list[T] = [None] * ncols  # type: ignore[list-item]
    for rr, cc in pivots:
        x[cc] = m[rr][ncols]
    return x
