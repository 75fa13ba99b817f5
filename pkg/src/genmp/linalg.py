"""Exact solution of square linear systems over the rationals.

Rows are scaled to integers and reduced with Bareiss' fraction-free
elimination; only the final back substitution produces fractions.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


class SingularSystemError(ValueError):
    pass


def _integer_row(row: Sequence[Fraction]) -> list[int]:
    scale = lcm(*(Fraction(v).denominator for v in row)) if row else 1
    return [int(Fraction(v) * scale) for v in row]


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``matrix @ x = rhs`` exactly; raise SingularSystemError if singular."""
    n = len(matrix)
    if len(rhs) != n or any(len(row) != n for row in matrix):
        raise ValueError("expected a square system")
    if n == 0:
        return []
    aug = [_integer_row(list(matrix[i]) + [rhs[i]]) for i in range(n)]

    prev = 1
    for k in range(n):
        # partial pivoting on magnitude keeps intermediate integers small
        pivot = max(range(k, n), key=lambda i: abs(aug[i][k]))
        if aug[pivot][k] == 0:
            raise SingularSystemError(f"singular system (column {k})")
        if pivot != k:
            aug[k], aug[pivot] = aug[pivot], aug[k]
        akk = aug[k][k]
        for i in range(k + 1, n):
            aik = aug[i][k]
            row_i, row_k = aug[i], aug[k]
            for j in range(k + 1, n + 1):
                # exact division is guaranteed by Sylvester's identity
                row_i[j] = (akk * row_i[j] - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk

    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(aug[i][n])
        for j in range(i + 1, n):
            acc -= aug[i][j] * x[j]
        x[i] = acc / aug[i][i]
    return x
