"""Dense exact linear algebra over a field (ScalarFn or Fraction entries).

Sizes here are small (binomial coefficients C(n, k) with n <= 6), so a
plain Gauss-Jordan elimination with a "simplest pivot" heuristic is
enough and keeps intermediate expressions short.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .errors import SingularOperator
from .scalarfield import Chart, ScalarFn

Matrix = list[list]


def _cost(x) -> int:
    if isinstance(x, ScalarFn):
        return len(x.num) + len(x.den) + x.num.total_degree() + x.den.total_degree()
    return 0


def identity(n: int, one, zero) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix, zero) -> Matrix:
    m = len(B[0]) if B else 0
    out = []
    for row in A:
        new = []
        for j in range(m):
            acc = zero
            for k, a in enumerate(row):
                if a and B[k][j]:
                    acc = acc + a * B[k][j]
            new.append(acc)
        out.append(new)
    return out


def _eliminate(M: Matrix, aug: Matrix | None):
    """Row-reduce ``M`` in place (mirroring operations on ``aug``).

    Returns the list of ``(row, column, pivot)`` triples.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        cand = [i for i in range(r, rows) if M[i][c]]
        if not cand:
            continue
        piv = min(cand, key=lambda i: _cost(M[i][c]))
        if piv != r:
            M[r], M[piv] = M[piv], M[r]
            if aug is not None:
                aug[r], aug[piv] = aug[piv], aug[r]
        p = M[r][c]
        inv = 1 / p
        M[r] = [x * inv if x else x for x in M[r]]
        if aug is not None:
            aug[r] = [x * inv if x else x for x in aug[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b if b else a for a, b in zip(M[i], M[r])]
                if aug is not None:
                    aug[i] = [a - f * b if b else a for a, b in zip(aug[i], aug[r])]
        pivots.append((r, c, p))
        r += 1
        if r == rows:
            break
    return pivots


def rank(M: Matrix) -> int:
    work = [list(row) for row in M]
    return len(_eliminate(work, None))


def det(M: Matrix, one):
    """Exact determinant by elimination with explicit swap tracking."""
    n = len(M)
    work = [list(row) for row in M]
    sign = 1
    acc = one
    for c in range(n):
        cand = [i for i in range(c, n) if work[i][c]]
        if not cand:
            return one * 0
        piv = min(cand, key=lambda i: _cost(work[i][c]))
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            sign = -sign
        p = work[c][c]
        acc = acc * p
        inv = 1 / p
        for i in range(c + 1, n):
            if work[i][c]:
                f = work[i][c] * inv
                work[i] = [a - f * b if b else a for a, b in zip(work[i], work[c])]
    return acc if sign == 1 else -acc


def inverse(M: Matrix, one, zero) -> Matrix:
    """Exact inverse; raises SingularOperator when M is singular."""
    n = len(M)
    work = [list(row) for row in M]
    aug = identity(n, one, zero)
    piv = _eliminate(work, aug)
    if len(piv) < n:
        raise SingularOperator(f"operator of size {n} has rank {len(piv)}")
    return aug


def scalar_identity(chart: Chart, n: int) -> Matrix:
    return identity(n, chart.one(), chart.zero())


def fraction_rank(M: Sequence[Sequence[Fraction]]) -> int:
    return rank([[Fraction(x) for x in row] for row in M])


def map_entries(M: Matrix, fn: Callable) -> Matrix:
    return [[fn(x) for x in row] for row in M]


def is_zero_matrix(M: Matrix) -> bool:
    return all(not x for row in M for x in row)


def sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]
