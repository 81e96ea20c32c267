"""Exact linear algebra over the integers and rationals.

Used for kernels whose Gram matrices are integer-valued (the binomial
kernel): projection norms and determinant ratios are computed without any
floating-point rounding, via fraction-free (Bareiss) elimination.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import SingularGram


def _eliminate(rows: list[list[int]], ncols: int):
    """Fraction-free forward elimination in place.

    ``rows`` is an n x ncols integer matrix whose left n columns are the
    square system; extra columns ride along as right-hand sides.  Returns the
    permutation sign.  Rows are swapped so the current diagonal entry is
    nonzero, preferring no swap: for unit-minor matrices this keeps every
    intermediate entry the size of a small minor.
    """
    n = len(rows)
    sign = 1
    prev = 1
    for k in range(n):
        if rows[k][k] == 0:
            cand = [i for i in range(k + 1, n) if rows[i][k] != 0]
            if not cand:
                raise SingularGram("exact elimination hit a structurally singular matrix")
            swap = max(cand, key=lambda i: abs(rows[i][k]))
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        akk = rows[k][k]
        for i in range(k + 1, n):
            aik = rows[i][k]
            row_i = rows[i]
            row_k = rows[k]
            for j in range(k + 1, ncols):
                # Bareiss update: division by the previous pivot is exact
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign


def int_det(matrix: list[list[int]]) -> int:
    """Exact determinant of a square integer matrix."""
    n = len(matrix)
    if n == 0:
        return 1
    rows = [list(map(int, r)) for r in matrix]
    try:
        sign = _eliminate(rows, n)
    except SingularGram:
        return 0
    return sign * rows[n - 1][n - 1]


def int_solve(matrix: list[list[int]], rhs: list[int]) -> list[Fraction]:
    """Exact solution of an integer linear system as Fractions."""
    n = len(matrix)
    rows = [list(map(int, r)) + [int(b)] for r, b in zip(matrix, rhs)]
    _eliminate(rows, n + 1)
    x: list[Fraction] = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = Fraction(rows[i][n])
        for j in range(i + 1, n):
            s -= rows[i][j] * x[j]
        x[i] = s / rows[i][i]
    return x


def exact_projection_norm(matrix: list[list[int]], target_index: int) -> Fraction:
    """Target entry of the exact solution of K zeta = delta_target."""
    n = len(matrix)
    rhs = [0] * n
    rhs[target_index] = 1
    return int_solve(matrix, rhs)[target_index]


def exact_det_ratio(matrix: list[list[int]], target_index: int) -> Fraction:
    """Determinant of the target-deleted minor over the full determinant."""
    full = int_det(matrix)
    if full == 0:
        raise SingularGram("exact determinant is zero")
    keep = [i for i in range(len(matrix)) if i != target_index]
    minor = [[matrix[i][j] for j in keep] for i in keep]
    return Fraction(int_det(minor), full)
