"""Exact integer linear algebra: Smith normal form, finitely generated
abelian groups, integer linear systems, and lattice utilities.

All matrices are dense lists of lists of Python ints (arbitrary precision);
no floating point is used anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

Matrix = list  # list[list[int]]


def identity_matrix(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zero_matrix(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def mat_copy(m: Matrix) -> Matrix:
    return [row[:] for row in m]


def transpose(m: Matrix) -> Matrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b:
        return [[0] * (len(b[0]) if b else 0) for _ in a]
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a: Matrix, v) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def mat_det(m: Matrix) -> int:
    """Determinant of a square integer matrix via fraction-free elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    assert det.denominator == 1
    return int(det)


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def _add_row(m, dst, src, factor):
    m[dst] = [x + factor * y for x, y in zip(m[dst], m[src])]


def _add_col(m, dst, src, factor):
    for row in m:
        row[dst] += factor * row[src]


def _negate_row(m, i):
    m[i] = [-x for x in m[i]]


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with U, V unimodular and U*m*V = D diagonal,
    the diagonal entries nonnegative and forming a divisibility chain.

    Pivot selection: minimal absolute value, ties broken by lowest row
    then lowest column index, so basis changes are reproducible.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    d = mat_copy(m)
    u = identity_matrix(rows)
    v = identity_matrix(cols)

    def pivot_at(t):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                e = abs(d[i][j])
                if e and (best is None or e < best[0]):
                    best = (e, i, j)
        return best

    t = 0
    while t < min(rows, cols):
        best = pivot_at(t)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            _swap_rows(d, t, pi)
            _swap_rows(u, t, pi)
        if pj != t:
            _swap_cols(d, t, pj)
            _swap_cols(v, t, pj)
        if d[t][t] < 0:
            _negate_row(d, t)
            _negate_row(u, t)
        # Clear row/column t; restart whenever a remainder shrinks the pivot.
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                if d[i][t]:
                    q = d[i][t] // d[t][t]
                    _add_row(d, i, t, -q)
                    _add_row(u, i, t, -q)
                    if d[i][t]:
                        _swap_rows(d, t, i)
                        _swap_rows(u, t, i)
                        if d[t][t] < 0:
                            _negate_row(d, t)
                            _negate_row(u, t)
                        dirty = True
            for j in range(t + 1, cols):
                if d[t][j]:
                    q = d[t][j] // d[t][t]
                    _add_col(d, j, t, -q)
                    _add_col(v, j, t, -q)
                    if d[t][j]:
                        _swap_cols(d, t, j)
                        _swap_cols(v, t, j)
                        dirty = True
                        if d[t][t] < 0:
                            _negate_row(d, t)
                            _negate_row(u, t)
        t += 1

    # Enforce the divisibility chain d[i][i] | d[i+1][i+1].
    rank = sum(1 for i in range(min(rows, cols)) if d[i][i] != 0)
    _fix_divisibility(d, u, v, rank)
    return u, d, v


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _fix_divisibility(d, u, v, rank):
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            a, b = d[i][i], d[i + 1][i + 1]
            if a and b and b % a != 0:
                changed = True
                # Bring b next to a via a column move, then 2x2 gcd reduction.
                _add_col(d, i, i + 1, 1)
                _add_col(v, i, i + 1, 1)
                g, x, y = _xgcd(d[i][i], d[i + 1][i])
                p, q = d[i][i] // g, d[i + 1][i] // g
                row_i = [x * s + y * t for s, t in zip(d[i], d[i + 1])]
                row_j = [-q * s + p * t for s, t in zip(d[i], d[i + 1])]
                d[i], d[i + 1] = row_i, row_j
                urow_i = [x * s + y * t for s, t in zip(u[i], u[i + 1])]
                urow_j = [-q * s + p * t for s, t in zip(u[i], u[i + 1])]
                u[i], u[i + 1] = urow_i, urow_j
                # Clear the off-diagonal fill-in.
                if d[i][i + 1]:
                    f = d[i][i + 1] // d[i][i]
                    _add_col(d, i + 1, i, -f)
                    _add_col(v, i + 1, i, -f)
                if d[i + 1][i]:
                    f = d[i + 1][i] // d[i][i]
                    _add_row(d, i + 1, i, -f)
                    _add_row(u, i + 1, i, -f)
                if d[i + 1][i + 1] < 0:
                    _negate_row(d, i + 1)
                    _negate_row(u, i + 1)


def is_unimodular(m: Matrix) -> bool:
    return len(m) == len(m[0]) and abs(mat_det(m)) == 1 if m else True


def unimodular_inverse(m: Matrix) -> Matrix:
    """Inverse of an integer matrix with determinant +-1."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    out = [[x for x in row[n:]] for row in a]
    assert all(x.denominator == 1 for row in out for x in row)
    return [[int(x) for x in row] for row in out]


def invariant_factors(m: Matrix) -> list[int]:
    _, d, _ = smith_normal_form(m)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i]]


@dataclass(frozen=True)
class FGAbelianGroup:
    """Structure of a finitely generated abelian group Z^free_rank + sum Z/d_i.

    basis_change maps ambient coordinates to normal-form coordinates: the
    first `free_rank` normal-form coordinates are free, the rest are read
    modulo the invariant factors.
    """
    free_rank: int
    invariant_factors: tuple[int, ...]
    basis_change: tuple[tuple[int, ...], ...] = ()

    @property
    def torsion_exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def describe(self) -> str:
        parts = []
        if self.free_rank:
            parts.append(f"Z^{self.free_rank}" if self.free_rank > 1 else "Z")
        parts.extend(f"Z/{d}" for d in self.invariant_factors)
        return " + ".join(parts) if parts else "0"


def cokernel(m: Matrix, rows: int | None = None) -> FGAbelianGroup:
    """Structure of Z^rows / (column span of m), with explicit basis change.

    `rows` may be given explicitly to allow matrices with zero columns.
    """
    if rows is None:
        rows = len(m)
    if not m or not m[0]:
        return FGAbelianGroup(rows, (), tuple(tuple(r) for r in identity_matrix(rows)))
    assert len(m) == rows
    u, d, _ = smith_normal_form(m)
    diag = [d[i][i] for i in range(min(rows, len(m[0])))]
    torsion = [x for x in diag if x > 1]
    rank = rows - sum(1 for x in diag if x != 0)
    # Order normal-form coordinates: free ones first, then torsion.
    free_idx = [i for i in range(rows) if i >= len(diag) or diag[i] == 0]
    tors_idx = [i for i in range(rows) if i < len(diag) and diag[i] > 1]
    perm = free_idx + tors_idx
    basis = tuple(tuple(u[i]) for i in perm)
    return FGAbelianGroup(rank, tuple(torsion), basis)


def solve_integer(m: Matrix, b: list) -> list | None:
    """Solve m*x = b over the integers; None when no solution exists."""
    rows = len(m)
    if rows and len(b) != rows:
        raise ValueError("dimension mismatch between matrix and right-hand side")
    cols = len(m[0]) if rows else 0
    if cols == 0:
        return [] if all(x == 0 for x in b) else None
    u, d, v = smith_normal_form(m)
    ub = mat_vec(u, b)
    y = [0] * cols
    for i in range(rows):
        di = d[i][i] if i < min(rows, cols) else 0
        if di:
            if ub[i] % di != 0:
                return None
            y[i] = ub[i] // di
        elif ub[i] != 0:
            return None
    return mat_vec(v, y)


def kernel_basis(m: Matrix) -> list[list[int]]:
    """Basis of the integer kernel {x : m*x = 0}."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if cols == 0:
        return []
    if rows == 0:
        return [list(r) for r in identity_matrix(cols)]
    _, d, v = smith_normal_form(m)
    rank = sum(1 for i in range(min(rows, cols)) if d[i][i] != 0)
    vt = transpose(v)
    return [list(vt[j]) for j in range(rank, cols)]


def vector_gcd(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def primitive_vector(v) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector (gcd 1).

    The direction is preserved; the zero vector is returned unchanged.
    """
    fr = [Fraction(x) for x in v]
    if all(x == 0 for x in fr):
        return tuple(0 for _ in fr)
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = vector_gcd(ints)
    return tuple(x // g for x in ints)


def saturation_basis(vectors: list, dim: int) -> list[tuple[int, ...]]:
    """Basis of the saturation (span_Q(vectors) intersect Z^dim) of the lattice
    spanned by the given integer vectors."""
    vecs = [list(v) for v in vectors if any(v)]
    if not vecs:
        return []
    m = transpose(vecs)  # columns are the vectors
    u, d, _ = smith_normal_form(m)
    rank = sum(1 for i in range(min(dim, len(vecs))) if d[i][i] != 0)
    uinv = unimodular_inverse(u)
    cols = transpose(uinv)
    return [tuple(cols[i]) for i in range(rank)]


def lattice_basis(vectors: list, dim: int) -> list[tuple[int, ...]]:
    """Basis of the lattice spanned by the given integer vectors in Z^dim."""
    vecs = [list(v) for v in vectors if any(v)]
    if not vecs:
        return []
    m = transpose(vecs)
    u, d, _ = smith_normal_form(m)
    rank = sum(1 for i in range(min(dim, len(vecs))) if d[i][i] != 0)
    uinv = unimodular_inverse(u)
    cols = transpose(uinv)
    return [tuple(d[i][i] * x for x in cols[i]) for i in range(rank)]


def in_lattice(vectors: list, v, dim: int) -> bool:
    """Is v in the sublattice of Z^dim spanned by the given vectors?"""
    if not vectors:
        return all(x == 0 for x in v)
    m = transpose([list(w) for w in vectors])
    return solve_integer(m, list(v)) is not None
