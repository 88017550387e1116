"""Fraction-free elimination over the integers and over Q[lam]."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .polyring import UPoly, lcm_denominators


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    out = []
    for row in rows:
        m = lcm_denominators(row)
        out.append([int(c * m) for c in row])
    return out


def _reduce_row(row: list[int]) -> list[int]:
    g = 0
    for c in row:
        g = math.gcd(g, c)
    return [c // g for c in row] if g > 1 else row


def echelon(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], list[int]]:
    """Integer row echelon form of a rational matrix.

    Row operations are ``r_i <- p*r_i - f*r_k`` followed by removal of the
    row content, so entries stay integral without ever forming fractions.
    Returns the nonzero echelon rows and their pivot columns.
    """
    m = _integer_rows(rows)
    ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, len(m)):
            f = m[i][c]
            if f:
                m[i] = _reduce_row([p * a - f * b for a, b in zip(m[i], m[r])])
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    if not rows:
        return 0
    return len(echelon(rows)[1])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int | None = None) -> list[list[Fraction]]:
    """Exact basis of ``{v : A v = 0}``, one vector per free column.

    Each basis vector has a 1 in its free column and zeros in the other
    free columns (reduced echelon convention), so the output is unique.
    """
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    ech, pivots = echelon(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in reversed(list(zip(ech, pivots))):
            s = sum((row[c] * v[c] for c in range(pc + 1, ncols) if row[c]), Fraction(0))
            v[pc] = -s / row[pc]
        basis.append(v)
    return basis


def det_bareiss(matrix: Sequence[Sequence]) -> object:
    """Determinant over an integral domain (ints or :class:`UPoly`).

    Bareiss' algorithm: every intermediate division is exact.
    """
    n = len(matrix)
    if n == 0:
        return 1
    a = [list(row) for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0 * a[0][0]
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = _exact_div(num, prev)
        prev = a[k][k]
    return a[n - 1][n - 1] * sign


def _exact_div(num, den):
    if isinstance(num, UPoly):
        return num.exact_div(den)
    if isinstance(den, UPoly):
        return UPoly((num,)).exact_div(den)
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError("inexact division in Bareiss elimination")
    return q


def upoly_pivot_rows(matrix: Sequence[Sequence[UPoly]]) -> list[int]:
    """Indices of a maximal set of rows independent over Q(lam)."""
    if not matrix:
        return []
    ncols = len(matrix[0])
    rows = [list(r) for r in matrix]
    order = list(range(len(rows)))
    chosen: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        order[r], order[piv] = order[piv], order[r]
        p = rows[r][c]
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                rows[i] = [p * a - f * b for a, b in zip(rows[i], rows[r])]
                rows[i] = _strip_row_content(rows[i])
        chosen.append(order[r])
        r += 1
        if r == len(rows):
            break
    return sorted(chosen)


def _strip_row_content(row: list[UPoly]) -> list[UPoly]:
    g = None
    for c in row:
        if c:
            g = c if g is None else g.gcd(c)
            if g.degree == 0:
                break
    if g is None or g.degree <= 0:
        return row
    return [c.exact_div(g) if c else c for c in row]
