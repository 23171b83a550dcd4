"""Exact linear algebra over the rationals with deterministic pivoting.

Matrices are lists of rows of Fractions.  Pivoting always scans columns
left to right and takes the first row with a nonzero entry, so results are
reproducible byte for byte; callers fix the column order (graded-lex on the
basis they use) before calling in here.
"""

from __future__ import annotations

from fractions import Fraction

Row = list[Fraction]
Matrix = list[Row]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def copy_matrix(matrix: Matrix) -> Matrix:
    return [row[:] for row in matrix]


def rref(matrix: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    m = copy_matrix(matrix)
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        if r >= len(m):
            break
        pivot_row = None
        for i in range(r, len(m)):
            if m[i][col]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = _ONE / m[r][col]
        if inv != 1:
            m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    return m, pivots


def rank(matrix: Matrix) -> int:
    return len(rref(matrix)[1])


def solve(matrix: Matrix, rhs: Row) -> Row | None:
    """One solution of A x = b with free variables zero; None if inconsistent."""
    if not matrix:
        return [] if not any(rhs) else None
    ncols = len(matrix[0])
    aug = [row[:] + [b] for row, b in zip(matrix, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [_ZERO] * ncols
    for i, col in enumerate(pivots):
        x[col] = red[i][ncols]
    return x


def solve_best_effort(matrix: Matrix, rhs: Row) -> tuple[Row, bool]:
    """Like solve(), but when inconsistent returns the pivot solution of the
    consistent rows along with consistent=False."""
    if not matrix:
        return [], not any(rhs)
    ncols = len(matrix[0])
    aug = [row[:] + [b] for row, b in zip(matrix, rhs)]
    red, pivots = rref(aug)
    consistent = ncols not in pivots
    x = [_ZERO] * ncols
    for i, col in enumerate(pivots):
        if col < ncols:
            x[col] = red[i][ncols]
    return x, consistent


SparseRow = dict[int, Fraction]


def rref_sparse(rows: list[SparseRow], ncols: int) -> tuple[list[SparseRow], list[int]]:
    """Sparse reduced row echelon form; same pivoting discipline as rref()."""
    rows = [dict(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if col in rows[i]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        prow = rows[r]
        inv = _ONE / prow[col]
        if inv != 1:
            prow = {c: v * inv for c, v in prow.items()}
            rows[r] = prow
        for i in range(len(rows)):
            if i == r:
                continue
            ri = rows[i]
            f = ri.get(col)
            if f:
                for c, v in prow.items():
                    nv = ri.get(c, _ZERO) - f * v
                    if nv:
                        ri[c] = nv
                    else:
                        ri.pop(c, None)
        pivots.append(col)
        r += 1
    return rows, pivots


def solve_best_effort_sparse(rows: list[SparseRow], ncols: int, rhs: Row
                             ) -> tuple[Row, bool]:
    """Sparse analogue of solve_best_effort on the augmented system."""
    aug = []
    for row, b in zip(rows, rhs):
        r = dict(row)
        if b:
            r[ncols] = b
        aug.append(r)
    red, pivots = rref_sparse(aug, ncols + 1)
    consistent = ncols not in pivots
    x = [_ZERO] * ncols
    for i, col in enumerate(pivots):
        if col < ncols:
            x[col] = red[i].get(ncols, _ZERO)
    return x, consistent


def nullspace(matrix: Matrix) -> list[Row]:
    """Basis of the kernel, one vector per free column, deterministic order."""
    if not matrix:
        return []
    ncols = len(matrix[0])
    red, pivots = rref(matrix)
    pivot_set = set(pivots)
    basis: list[Row] = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [_ZERO] * ncols
        vec[free] = _ONE
        for i, col in enumerate(pivots):
            vec[col] = -red[i][free]
        basis.append(vec)
    return basis


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return [[sum((x * y for x, y in zip(row, col)), _ZERO)
             for col in zip(*b)] for row in a]


def mat_vec(a: Matrix, v: Row) -> Row:
    return [sum((x * y for x, y in zip(row, v)), _ZERO) for row in a]


def identity(n: int) -> Matrix:
    return [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)]


def mat_inv(matrix: Matrix) -> Matrix | None:
    """Inverse of a square rational matrix, or None if singular."""
    n = len(matrix)
    aug = [row[:] + ident_row[:] for row, ident_row in zip(matrix, identity(n))]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        return None
    return [row[n:] for row in red[:n]]
