"""Small exact linear algebra over rationals.

Matrices are lists of row lists of rationals.  Sizes here are tiny (n <= 6),
so plain fraction Gaussian elimination is all that is needed.
"""

from __future__ import annotations

from typing import List, Sequence

from ._rat import Rat, rat

Matrix = List[List[Rat]]


def identity(n: int) -> Matrix:
    return [[rat(1) if i == j else rat(0) for j in range(n)] for i in range(n)]


def mat_vec(m: Matrix, v: Sequence) -> List[Rat]:
    return [sum((row[j] * rat(v[j]) for j in range(len(v))), rat(0)) for row in m]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    return [
        [sum((a[i][t] * b[t][j] for t in range(k)), rat(0)) for j in range(m)]
        for i in range(n)
    ]


def det(m: Matrix) -> Rat:
    """Determinant by fraction Gaussian elimination with row pivoting."""
    n = len(m)
    a = [[rat(x) for x in row] for row in m]
    sign = rat(1)
    result = rat(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            return rat(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            sign = -sign
        p = a[col][col]
        result = result * p
        for r in range(col + 1, n):
            factor = a[r][col] / p
            if factor:
                for c in range(col, n):
                    a[r][c] = a[r][c] - factor * a[col][c]
    return sign * result


def inverse(m: Matrix) -> Matrix:
    """Exact inverse via Gauss-Jordan; raises ValueError if singular."""
    n = len(m)
    a = [[rat(x) for x in row] + [rat(1) if i == j else rat(0) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def leading_principal_minors(m: Matrix) -> List[Rat]:
    """Determinants of the top-left 1x1, 2x2, ..., nxn submatrices."""
    n = len(m)
    return [det([row[: k + 1] for row in m[: k + 1]]) for k in range(n)]


def transpose(m: Matrix) -> Matrix:
    return [list(col) for col in zip(*m)]
