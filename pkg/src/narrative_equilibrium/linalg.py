"""Exact Gaussian elimination over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def solve_linear_system(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Solve ``matrix @ x = rhs`` exactly; ``None`` if singular or inconsistent.

    ``matrix`` may have more rows than columns; surplus rows must reduce to
    ``0 = 0``.
    """
    rows = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(matrix, rhs)]
    n_rows = len(rows)
    n_cols = len(rows[0]) - 1 if rows else 0
    piv_r = 0
    for col in range(n_cols):
        pivot = next((r for r in range(piv_r, n_rows) if rows[r][col] != 0), None)
        if pivot is None:
            return None
        rows[piv_r], rows[pivot] = rows[pivot], rows[piv_r]
        top = rows[piv_r]
        inv = 1 / top[col]
        for c in range(col, n_cols + 1):
            top[c] *= inv
        for r in range(n_rows):
            if r == piv_r:
                continue
            factor = rows[r][col]
            if factor == 0:
                continue
            row = rows[r]
            for c in range(col, n_cols + 1):
                if top[c]:
                    row[c] -= factor * top[c]
        piv_r += 1
    for r in range(piv_r, n_rows):
        if rows[r][n_cols] != 0:
            return None
    return [rows[r][n_cols] for r in range(n_cols)]
