"""Exact matrix helpers over Q and Z.

Matrices are tuples (or lists) of rows.  Rational entries are ``Fraction``;
integer routines only ever see Python ints, so nothing here touches floats.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence

Row = Sequence
Matrix = Sequence[Sequence]


def to_fraction_matrix(rows: Matrix) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a: Matrix) -> list[list]:
    return [list(col) for col in zip(*a)] if a else []


def matmul(a: Matrix, b: Matrix) -> list[list]:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def congruent(basis: Matrix, gram: Matrix) -> tuple[tuple[Fraction, ...], ...]:
    """Gram matrix of the vectors ``basis`` (rows) under ``gram``."""
    if not basis:
        return ()
    gb = matmul(basis, gram)
    return to_fraction_matrix(matmul(gb, transpose(basis)))


def det(a: Matrix) -> Fraction:
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    result = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            result = -result
        piv = m[c][c]
        result *= piv
        for r in range(c + 1, n):
            f = m[r][c] / piv
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return result


def rank(a: Matrix) -> int:
    return len(row_echelon(a)[1])


def row_echelon(a: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[Fraction(x) for x in row] for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def inverse(a: Matrix) -> tuple[tuple[Fraction, ...], ...]:
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, piv = row_echelon(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(row[n:]) for row in red[:n])


def solve_left(basis: Matrix, vectors: Matrix) -> list[list[Fraction]]:
    """Coefficients c with c @ basis == v for every row v (basis rows independent)."""
    k = len(basis)
    if not vectors:
        return []
    if k == 0:
        if any(any(x for x in v) for v in vectors):
            raise ValueError("vector outside span")
        return [[] for _ in vectors]
    # Solve basis^T c^T = v^T column by column through one elimination.
    bt = transpose(basis)
    aug = [list(map(Fraction, bt[i])) + [Fraction(v[i]) for v in vectors] for i in range(len(bt))]
    red, piv = row_echelon(aug)
    if piv[:k] != list(range(k)) or any(p >= k for p in piv):
        raise ValueError("vector outside span")
    out = []
    for j in range(len(vectors)):
        out.append([red[i][k + j] for i in range(k)])
    return out


def ldl(gram: Matrix) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Decompose q(x) = sum_i d_i (x_i + sum_{j>i} u[i][j] x_j)^2.

    Raises ``ValueError`` when the form is not positive definite.
    """
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    d = [Fraction(0)] * n
    u = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        if d[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            u[i][j] = a[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(j, n):
                a[j][k] -= d[i] * u[i][j] * u[i][k]
                a[k][j] = a[j][k]
    return d, u


def floor_sqrt(q: Fraction) -> int:
    """Largest integer s with s*s <= q (q >= 0)."""
    return isqrt(q.numerator * q.denominator) // q.denominator


def common_denominator(rows: Matrix) -> int:
    den = 1
    for row in rows:
        for x in row:
            d = Fraction(x).denominator
            den = den * d // gcd(den, d)
    return den


def integer_rows(rows: Matrix) -> list[list[int]]:
    """Scale each row by its own denominator so it becomes integral."""
    out = []
    for row in rows:
        den = common_denominator([row])
        out.append([int(Fraction(x) * den) for x in row])
    return out


def _column_hermite(a: list[list[int]]) -> tuple[list[list[int]], list[list[int]], int]:
    """Column operations turning ``a`` into lower echelon form.

    Returns (reduced matrix, unimodular U with a @ U == reduced, number of
    nonzero pivot columns).  Columns past the pivots span the integer kernel.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [row[:] for row in a]
    u = identity(cols)

    def colop(j: int, k: int, c: int) -> None:
        # column j -= c * column k
        for row in m:
            row[j] -= c * row[k]
        for row in u:
            row[j] -= c * row[k]

    def swap(j: int, k: int) -> None:
        for row in m:
            row[j], row[k] = row[k], row[j]
        for row in u:
            row[j], row[k] = row[k], row[j]

    piv = 0
    for r in range(rows):
        if piv == cols:
            break
        while True:
            nz = [j for j in range(piv, cols) if m[r][j] != 0]
            if not nz:
                break
            j0 = min(nz, key=lambda j: abs(m[r][j]))
            swap(piv, j0)
            done = True
            for j in range(piv + 1, cols):
                if m[r][j]:
                    colop(j, piv, m[r][j] // m[r][piv])
                    if m[r][j]:
                        done = False
            if done:
                break
        if m[r][piv] != 0:
            if m[r][piv] < 0:
                for row in m:
                    row[piv] = -row[piv]
                for row in u:
                    row[piv] = -row[piv]
            piv += 1
    return m, u, piv


def integer_kernel(a: Matrix) -> list[list[int]]:
    """Basis (rows) of {x in Z^n : a x = 0}; the result is saturated in Z^n.

    ``a`` may have rational entries; rows are rescaled to integers first.
    """
    if not a:
        return []
    cols = len(a[0])
    ai = integer_rows(a)
    _, u, piv = _column_hermite(ai)
    basis = [[u[i][j] for i in range(cols)] for j in range(piv, cols)]
    return hermite_rows(basis)


def hermite_rows(basis: list[list[int]]) -> list[list[int]]:
    """Row Hermite normal form of an integer basis (same row lattice)."""
    if not basis:
        return []
    h, _, piv = _column_hermite(transpose(basis))
    return [list(r) for r in transpose(h)[:piv]]


def smith_invariants(a: Matrix) -> list[int]:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""
    m = [list(map(int, row)) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    out: list[int] = []
    t = 0
    while t < min(rows, cols):
        entries = [(abs(m[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if m[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        m[t], m[i0] = m[i0], m[t]
        for row in m:
            row[t], row[j0] = row[j0], row[t]
        clean = True
        p = m[t][t]
        for i in range(t + 1, rows):
            q = m[i][t] // p
            if q:
                m[i] = [x - q * y for x, y in zip(m[i], m[t])]
            if m[i][t]:
                clean = False
        for j in range(t + 1, cols):
            q = m[t][j] // p
            if q:
                for row in m:
                    row[j] -= q * row[t]
            if m[t][j]:
                clean = False
        if not clean:
            continue
        bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if m[i][j] % p), None)
        if bad is not None:
            m[t] = [x + y for x, y in zip(m[t], m[bad[0]])]
            continue
        out.append(abs(p))
        t += 1
    return out


def normalize_torsion(factors: Sequence[int]) -> tuple[int, ...]:
    """Invariant-factor form (d_1 | d_2 | ...), dropping trivial factors."""
    fs = [int(f) for f in factors if int(f) != 1]
    if any(f <= 0 for f in fs):
        raise ValueError("torsion factors must be positive")
    if not fs:
        return ()
    diag = [[f if i == j else 0 for j in range(len(fs))] for i, f in enumerate(fs)]
    return tuple(x for x in smith_invariants(diag) if x != 1)
