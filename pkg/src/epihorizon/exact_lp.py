"""Two-phase simplex over exact rationals.

Small dense problems only: maximise ``c @ x`` subject to ``A @ x == b`` and
``x >= 0``. Bland's rule is used for both entering and leaving variables, so
the method terminates without cycling.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence


class Unbounded(ArithmeticError):
    pass


def _pivot(rows: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    pr = rows[r]
    piv = pr[c]
    if piv != 1:
        pr[:] = [v / piv for v in pr]
    for i, row in enumerate(rows):
        if i != r:
            f = row[c]
            if f:
                row[:] = [a - f * b for a, b in zip(row, pr)]
    if r < len(basis):
        basis[r] = c


def _iterate(rows: list[list[Fraction]], basis: list[int], ncols: int) -> None:
    """Run simplex pivots; the objective row is ``rows[-1]``."""
    obj = rows[-1]
    m = len(basis)
    while True:
        enter = next((j for j in range(ncols) if obj[j] < 0), None)
        if enter is None:
            return
        best = None
        for i in range(m):
            a = rows[i][enter]
            if a > 0:
                ratio = rows[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise Unbounded(f"objective unbounded along column {enter}")
        _pivot(rows, basis, best[1], enter)


def solve(A: Sequence[Sequence], b: Sequence, c: Optional[Sequence] = None
          ) -> Optional[tuple[list[Fraction], Fraction]]:
    """Return ``(x, c @ x)`` at an optimum, or None when infeasible.

    With ``c`` omitted any feasible point is returned.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    if len(b) != m or any(len(row) != n for row in A):
        raise ValueError("inconsistent constraint dimensions")
    c = [Fraction(0)] * n if c is None else [Fraction(v) for v in c]

    # phase 1: artificial variable per row, rhs made non-negative
    rows = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        rows.append([sign * v for v in A[i]] + art + [sign * b[i]])
    obj = [Fraction(0)] * (n + m + 1)
    for row in rows:
        for j in range(n):
            obj[j] -= row[j]
        obj[-1] -= row[-1]
    rows.append(obj)
    basis = list(range(n, n + m))
    _iterate(rows, basis, n + m)
    if rows[-1][-1] != 0:
        return None

    # drive zero-level artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(basis):
        if basis[i] >= n:
            j = next((j for j in range(n) if rows[i][j] != 0), None)
            if j is None:
                del rows[i]
                del basis[i]
                continue
            _pivot(rows, basis, i, j)
        i += 1

    # phase 2 on the original columns
    rows = [row[:n] + [row[-1]] for row in rows[:-1]]
    obj = [-v for v in c] + [Fraction(0)]
    for i, bj in enumerate(basis):
        f = obj[bj]
        if f:
            obj = [a - f * v for a, v in zip(obj, rows[i])]
    rows.append(obj)
    _iterate(rows, basis, n)

    x = [Fraction(0)] * n
    for i, bj in enumerate(basis):
        x[bj] = rows[i][-1]
    return x, rows[-1][-1]
