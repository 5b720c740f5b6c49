"""Exact integer matrix arithmetic: determinants, Smith normal form, kernels.

Everything here runs on Python's arbitrary-precision integers.  The
Bareiss intermediates for a rank-19 Gram matrix already overflow 64 bits,
so no fixed-width shortcut is taken anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionError, DomainError


class IntMatrix:
    """Immutable integer matrix stored row-major as nested tuples.

    >>> IntMatrix([[1, 2], [3, 4]]).shape
    (2, 2)
    """

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows):
        rows = tuple(tuple(int(x) for x in row) for row in rows)
        width = len(rows[0]) if rows else 0
        if any(len(r) != width for r in rows):
            raise DimensionError("ragged rows in matrix literal")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = width

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries):
        entries = list(entries)
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def is_square(self):
        return self.nrows == self.ncols

    def is_symmetric(self):
        return self.is_square() and all(
            self.rows[i][j] == self.rows[j][i]
            for i in range(self.nrows)
            for j in range(i)
        )

    def transpose(self):
        return IntMatrix(list(zip(*self.rows))) if self.nrows else IntMatrix([])

    def mul(self, other):
        if self.ncols != other.nrows:
            raise DimensionError(
                f"cannot multiply {self.shape} by {other.shape}"
            )
        bt = list(zip(*other.rows)) if other.nrows else []
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in bt] for row in self.rows]
        )

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.rows]})"

    def to_lists(self):
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class SmithForm:
    """Diagonalization u @ a @ v = diag(d) with u, v unimodular.

    The diagonal ``d`` has length min(nrows, ncols); entries are
    nonnegative and each divides the next.
    """

    d: tuple
    u: IntMatrix
    v: IntMatrix


def det_exact(a: IntMatrix) -> int:
    """Exact determinant by Bareiss fraction-free elimination.

    The empty 0x0 matrix has determinant 1 (empty product).
    """
    if not a.is_square():
        raise DimensionError(f"determinant needs a square matrix, got {a.shape}")
    n = a.nrows
    if n == 0:
        return 1
    m = a.to_lists()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i = m[i]
            row_k = m[k]
            aik = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def _find_pivot(m, start, nrows, ncols):
    """Smallest-magnitude nonzero entry in the trailing submatrix."""
    best = None
    best_pos = None
    for i in range(start, nrows):
        row = m[i]
        for j in range(start, ncols):
            x = row[j]
            if x != 0:
                ax = -x if x < 0 else x
                if best is None or ax < best:
                    best = ax
                    best_pos = (i, j)
                    if ax == 1:
                        return best_pos
    return best_pos


def _snf_inplace(m, nrows, ncols, u=None, v=None):
    """Diagonalize ``m`` by elementary operations; mirror them on u, v."""
    k = 0
    bound = min(nrows, ncols)
    while k < bound:
        pos = _find_pivot(m, k, nrows, ncols)
        if pos is None:
            break
        i, j = pos
        if i != k:
            m[k], m[i] = m[i], m[k]
            if u is not None:
                u[k], u[i] = u[i], u[k]
        if j != k:
            for row in m:
                row[k], row[j] = row[j], row[k]
            if v is not None:
                for row in v:
                    row[k], row[j] = row[j], row[k]
        # Clear column k, then row k; retry from pivot selection whenever a
        # division leaves a remainder (the remainder is strictly smaller, so
        # this terminates).
        dirty = False
        pivot = m[k][k]
        for i in range(k + 1, nrows):
            x = m[i][k]
            if x == 0:
                continue
            q = x // pivot
            if q:
                row_i, row_k = m[i], m[k]
                for t in range(k, ncols):
                    row_i[t] -= q * row_k[t]
                if u is not None:
                    urow_i, urow_k = u[i], u[k]
                    for t in range(len(urow_i)):
                        urow_i[t] -= q * urow_k[t]
            if m[i][k] != 0:
                dirty = True
        if dirty:
            continue
        for j in range(k + 1, ncols):
            x = m[k][j]
            if x == 0:
                continue
            q = x // pivot
            if q:
                for row in m:
                    row[j] -= q * row[k]
                if v is not None:
                    for row in v:
                        row[j] -= q * row[k]
            if m[k][j] != 0:
                dirty = True
        if dirty:
            continue
        # Pivot must divide every remaining entry for the divisibility chain;
        # if not, fold the offending row in and retry.
        offender = None
        for i in range(k + 1, nrows):
            row = m[i]
            for j in range(k + 1, ncols):
                if row[j] % pivot != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_o, row_k = m[offender], m[k]
            for t in range(k, ncols):
                row_k[t] += row_o[t]
            if u is not None:
                urow_o, urow_k = u[offender], u[k]
                for t in range(len(urow_k)):
                    urow_k[t] += urow_o[t]
            continue
        if pivot < 0:
            for t in range(k, ncols):
                m[k][t] = -m[k][t]
            if u is not None:
                u[k] = [-x for x in u[k]]
        k += 1
    return [m[i][i] for i in range(bound)]


def smith_normal_form(a: IntMatrix) -> SmithForm:
    """Smith normal form with unimodular transforms.

    >>> smith_normal_form(IntMatrix([[2, 0], [0, 2]])).d
    (2, 2)
    """
    nrows, ncols = a.nrows, a.ncols
    m = a.to_lists()
    u = IntMatrix.identity(nrows).to_lists()
    v = IntMatrix.identity(ncols).to_lists()
    d = _snf_inplace(m, nrows, ncols, u, v)
    return SmithForm(tuple(d), IntMatrix(u), IntMatrix(v))


def invariant_factors(a: IntMatrix) -> tuple:
    """Diagonal of the Smith form only; skips the transform bookkeeping."""
    m = a.to_lists()
    return tuple(_snf_inplace(m, a.nrows, a.ncols))


def invariant_factors_of_rows(rows, ncols) -> tuple:
    """invariant_factors for a raw list-of-lists (mutated in place)."""
    return tuple(_snf_inplace(rows, len(rows), ncols))


def rank(a: IntMatrix) -> int:
    return sum(1 for x in invariant_factors(a) if x != 0)


def invert_unimodular(a: IntMatrix) -> IntMatrix:
    """Exact inverse of an integer matrix with determinant +-1."""
    if not a.is_square():
        raise DimensionError("only square matrices can be inverted")
    n = a.nrows
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a.rows)]
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            raise DomainError("matrix is singular")
        m[k], m[piv] = m[piv], m[k]
        inv = 1 / m[k][k]
        m[k] = [x * inv for x in m[k]]
        for i in range(n):
            if i != k and m[i][k] != 0:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    out = [[x for x in row[n:]] for row in m]
    if any(x.denominator != 1 for row in out for x in row):
        raise DomainError("matrix is not unimodular")
    return IntMatrix([[int(x) for x in row] for row in out])


def solve_exact(a: IntMatrix, b: IntMatrix):
    """Solve a @ x = b over the rationals for square nonsingular ``a``.

    Returns x as a list of Fraction rows.
    """
    if not a.is_square():
        raise DimensionError("solve needs a square coefficient matrix")
    if a.nrows != b.nrows:
        raise DimensionError("right-hand side has the wrong height")
    n, w = a.nrows, b.ncols
    m = [[Fraction(x) for x in arow] + [Fraction(y) for y in brow]
         for arow, brow in zip(a.rows, b.rows)]
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            raise DomainError("coefficient matrix is singular")
        m[k], m[piv] = m[piv], m[k]
        inv = 1 / m[k][k]
        m[k] = [x * inv for x in m[k]]
        for i in range(n):
            if i != k and m[i][k] != 0:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return [row[n:n + w] for row in m]


def kernel_basis(a: IntMatrix) -> list:
    """Basis of the integer kernel {x : a @ x = 0}, as column vectors.

    The kernel of an integer matrix is a saturated sublattice, so the
    columns of the Smith ``v`` transform beyond the rank are a basis.
    """
    sf = smith_normal_form(a)
    r = sum(1 for x in sf.d if x != 0)
    cols = []
    for j in range(r, a.ncols):
        cols.append([sf.v.rows[i][j] for i in range(a.ncols)])
    return cols


def column_space_basis(a: IntMatrix) -> IntMatrix:
    """Square basis matrix of the lattice spanned by the columns of ``a``.

    Requires the columns to span a full-rank lattice.
    """
    sf = smith_normal_form(a)
    r = sum(1 for x in sf.d if x != 0)
    if r != a.nrows:
        raise DomainError("columns do not span a full-rank lattice")
    uinv = invert_unimodular(sf.u)
    cols = [[uinv.rows[i][j] * sf.d[j] for j in range(r)] for i in range(a.nrows)]
    return IntMatrix(cols)
