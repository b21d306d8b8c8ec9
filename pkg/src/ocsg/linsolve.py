"""Exact linear solving by fraction-free (Bareiss) Gaussian elimination.

Rows are scaled to integers first, so every intermediate entry stays an
integer and the final pivot is (up to sign) the determinant of the scaled
system.  Solutions come back as Fractions; solution denominators always
divide that pivot product, which callers may use as a size certificate.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm


class SingularMatrixError(ValueError):
    pass


def solve_linear_system(matrix, rhs) -> tuple[list[Fraction], int]:
    """Solve ``matrix @ x = rhs`` exactly.

    Returns ``(x, pivot_product)`` where ``pivot_product`` is the absolute
    determinant of the integer matrix obtained by clearing row denominators.
    Raises SingularMatrixError when the system is not uniquely solvable.
    """
    n = len(matrix)
    if n == 0:
        return [], 1
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise ValueError("square system expected")

    m: list[list[int]] = []
    b: list[int] = []
    for row, r in zip(matrix, rhs):
        entries = [Fraction(a) for a in row] + [Fraction(r)]
        scale = lcm(*(e.denominator for e in entries))
        m.append([int(e * scale) for e in entries[:-1]])
        b.append(int(entries[-1] * scale))

    prev = 1
    for k in range(n - 1):
        pivot_row = next((i for i in range(k, n) if m[i][k] != 0), None)
        if pivot_row is None:
            raise SingularMatrixError(f"no pivot in column {k}")
        if pivot_row != k:
            m[k], m[pivot_row] = m[pivot_row], m[k]
            b[k], b[pivot_row] = b[pivot_row], b[k]
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
            b[i] = (b[i] * pivot - mik * b[k]) // prev
            row_i[k] = 0
        prev = pivot

    if m[n - 1][n - 1] == 0:
        raise SingularMatrixError("singular system")

    x: list[Fraction] = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = Fraction(b[i])
        for j in range(i + 1, n):
            s -= m[i][j] * x[j]
        x[i] = s / m[i][i]
    return x, abs(m[n - 1][n - 1])
