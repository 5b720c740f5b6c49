"""Enumeration and isometry classification of even positive-definite
lattices of rank at most 3.

Candidates are produced in reduced shape (ascending diagonal, off-diagonal
entries at most half the diagonal) with the classical product bound
g11*g22*g33 <= 2*det as pruning; every isometry class of the right
determinant contains a genuinely Minkowski-reduced Gram satisfying all of
these, so the scan is complete.  Residual duplicates on the boundary of
the reduction domain are removed by explicit isometry testing.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .discforms import FiniteQuadraticForm, are_isomorphic, disc_form
from .errors import DomainError, ResourceLimitError
from .lattices import GramLattice

DET_BOUND = 100_000


@dataclass(frozen=True)
class ReducedForm:
    """Even positive-definite Gram of rank <= 3 in reduced shape."""

    gram: tuple

    def __post_init__(self):
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        n = len(gram)
        if not 1 <= n <= 3 or any(len(r) != n for r in gram):
            raise DomainError("reduced forms have rank 1..3")
        for i in range(n):
            if gram[i][i] % 2:
                raise DomainError("diagonal entries must be even")
            for j in range(i):
                if gram[i][j] != gram[j][i]:
                    raise DomainError("Gram matrix must be symmetric")
                if 2 * abs(gram[i][j]) > gram[j][j]:
                    raise DomainError("off-diagonal entry exceeds the reduced bound")
        diag = [gram[i][i] for i in range(n)]
        if diag != sorted(diag) or diag[0] <= 0:
            raise DomainError("diagonal must be positive and ascending")
        if _det3(gram) <= 0 or (n >= 2 and gram[0][0] * gram[1][1] - gram[0][1] ** 2 <= 0):
            raise DomainError("form is not positive definite")

    @property
    def rank(self):
        return len(self.gram)

    @property
    def det(self):
        return _det3(self.gram)

    def lattice(self) -> GramLattice:
        return GramLattice([list(r) for r in self.gram])


def _det3(g):
    n = len(g)
    if n == 1:
        return g[0][0]
    if n == 2:
        return g[0][0] * g[1][1] - g[0][1] ** 2
    return (
        g[0][0] * g[1][1] * g[2][2]
        - g[0][0] * g[1][2] ** 2
        - g[2][2] * g[0][1] ** 2
        - g[1][1] * g[0][2] ** 2
        + 2 * g[0][1] * g[0][2] * g[1][2]
    )


# -- exact short-vector enumeration ---------------------------------------


def _cholesky(gram):
    """Rational quadratic completion Q(x) = sum a_i (x_i + sum a_ij x_j)^2."""
    n = len(gram)
    m = [[Fraction(x) for x in row] for row in gram]
    a = []
    alpha = []
    for i in range(n):
        a.append(m[i][i])
        row = [m[i][j] / m[i][i] for j in range(n)]
        alpha.append(row)
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                m[r][c] -= m[r][i] * row[c]
    return a, alpha


def _int_interval(c: Fraction, lim: Fraction):
    """Integers x with (x + c)^2 <= lim, as an inclusive (lo, hi) pair.

    sqrt(lim) is sandwiched between isqrt-derived rationals and the
    endpoints adjusted by exact comparison, so nothing on the boundary
    is lost.
    """
    if lim < 0:
        return 1, 0
    s = isqrt(lim.numerator * lim.denominator)
    outer = Fraction(s + 1, lim.denominator)  # > sqrt(lim)
    hi = (outer - c).__floor__()
    while (hi + c) ** 2 > lim:
        hi -= 1
    lo = (-outer - c).__floor__()
    while (lo + c) ** 2 > lim:
        lo += 1
    return lo, hi


def norm_of(gram, v) -> int:
    n = len(gram)
    return sum(gram[i][j] * v[i] * v[j] for i in range(n) for j in range(n))


@lru_cache(maxsize=4096)
def short_vectors(gram: tuple, bound: int) -> tuple:
    """All nonzero integer vectors with norm <= bound, exact arithmetic."""
    n = len(gram)
    a, alpha = _cholesky(gram)
    out = []
    v = [0] * n

    def rec(i, remaining):
        if i < 0:
            if any(v):
                out.append(tuple(v))
            return
        c = sum(alpha[i][j] * v[j] for j in range(i + 1, n)) if i + 1 < n else Fraction(0)
        lo, hi = _int_interval(c, remaining / a[i])
        for x in range(lo, hi + 1):
            v[i] = x
            rec(i - 1, remaining - a[i] * (x + c) ** 2)
        v[i] = 0

    rec(n - 1, Fraction(bound))
    for w in out:
        assert norm_of(gram, w) <= bound
    return tuple(out)


def vector_counts(gram: tuple, bound: int) -> tuple:
    """Count of vectors by norm up to the bound; an isometry invariant."""
    counts = {}
    for w in short_vectors(gram, bound):
        nw = norm_of(gram, w)
        counts[nw] = counts.get(nw, 0) + 1
    return tuple(sorted(counts.items()))


# Fixed small bound for the cheap fingerprint used to bucket candidates.
_PROFILE_BOUND = 32


def is_isometric(l1: ReducedForm, l2: ReducedForm) -> bool:
    """Does an integral isometry exist between the two forms?

    Filters by determinant and vector-count fingerprints, then backtracks
    over images of the basis among vectors of matching norm.  Equal
    determinants make any integral solution of x^T G1 x = G2 unimodular
    automatically.
    """
    if l1.rank != l2.rank:
        raise DomainError("isometry testing needs equal ranks")
    if l1.det != l2.det:
        return False
    g1, g2 = l1.gram, l2.gram
    if g1 == g2:
        return True
    n = l1.rank
    if vector_counts(g1, _PROFILE_BOUND) != vector_counts(g2, _PROFILE_BOUND):
        return False
    # Search for x with x^T g1 x = g2, mapping the basis of the form with
    # the smaller diagonal; that caps the vector enumeration bound.
    md1 = max(g1[i][i] for i in range(n))
    md2 = max(g2[i][i] for i in range(n))
    if md1 < md2:
        g1, g2 = g2, g1
        md1, md2 = md2, md1
    if vector_counts(g1, md2) != vector_counts(g2, md2):
        return False
    by_norm = {}
    for w in short_vectors(g1, md2):
        by_norm.setdefault(norm_of(g1, w), []).append(w)
    chosen = []

    def pair(u, w):
        return sum(g1[i][j] * u[i] * w[j] for i in range(n) for j in range(n))

    def place(i):
        if i == n:
            return True
        for w in by_norm.get(g2[i][i], ()):
            if all(pair(chosen[t], w) == g2[t][i] for t in range(i)):
                chosen.append(w)
                if place(i + 1):
                    return True
                chosen.pop()
        return False

    return place(0)


# -- reduced-shape enumeration ---------------------------------------------


def _rank1_forms(det):
    return [((det,),)] if det % 2 == 0 else []


def _rank2_forms(det):
    out = []
    g11 = 2
    while 3 * g11 * g11 <= 4 * det:
        for g12 in range(0, g11 // 2 + 1):
            num = det + g12 * g12
            if num % g11:
                continue
            g22 = num // g11
            if g22 >= g11 and g22 % 2 == 0:
                out.append(((g11, g12), (g12, g22)))
        g11 += 2
    return out


def _rank3_partition(det, g11):
    """All reduced-shape rank-3 candidates with the given leading entry."""
    out = []
    half11 = g11 // 2
    two_det = 2 * det
    for g12 in range(0, half11 + 1):
        for g13 in range(-half11, half11 + 1):
            g22 = g11
            while g11 * g22 * g22 <= two_det:
                m2 = g11 * g22 - g12 * g12
                half22 = g22 // 2
                for g23 in range(-half22, half22 + 1):
                    num = det - 2 * g12 * g13 * g23 + g11 * g23 * g23 + g22 * g13 * g13
                    if num % m2:
                        continue
                    g33 = num // m2
                    if g33 < g22 or g33 % 2 or g11 * g22 * g33 > two_det:
                        continue
                    out.append(((g11, g12, g13), (g12, g22, g23), (g13, g23, g33)))
                g22 += 2
    return out


def _raw_reduced(rank: int, det: int, threads: int = 1) -> list:
    """Structurally distinct reduced-shape candidates, duplicates by
    isometry still possible."""
    if rank not in (1, 2, 3):
        raise DomainError(f"rank must be 1..3, got {rank}")
    if det < 1:
        raise DomainError(f"determinant must be positive, got {det}")
    if det > DET_BOUND:
        raise ResourceLimitError(
            f"determinant {det} exceeds the enumeration bound {DET_BOUND}"
        )
    if rank == 1:
        raw = _rank1_forms(det)
    elif rank == 2:
        raw = _rank2_forms(det)
    else:
        g11s = []
        g11 = 2
        while g11 ** 3 <= 2 * det:
            g11s.append(g11)
            g11 += 2
        if threads > 1 and len(g11s) > 1:
            with ProcessPoolExecutor(max_workers=threads) as ex:
                chunks = list(ex.map(_rank3_partition, itertools.repeat(det), g11s))
        else:
            chunks = [_rank3_partition(det, g) for g in g11s]
        raw = [g for chunk in chunks for g in chunk]
    return [ReducedForm(g) for g in dict.fromkeys(raw)]


def _dedup_isometry(forms) -> list:
    """One representative per isometry class, bucketed by cheap invariants."""
    buckets = {}
    reps = []
    for f in forms:
        key = vector_counts(f.gram, _PROFILE_BOUND)
        bucket = buckets.setdefault(key, [])
        if not any(is_isometric(f, r) for r in bucket):
            bucket.append(f)
            reps.append(f)
    return reps


def enumerate_reduced(rank: int, det: int, threads: int = 1) -> list:
    """All even positive-definite forms of the rank and determinant,
    one representative per isometry class."""
    return _dedup_isometry(_raw_reduced(rank, det, threads=threads))


@dataclass(frozen=True)
class GenusSpec:
    """Target rank, determinant, and (optionally) discriminant form."""

    rank: int
    det: int
    disc: FiniteQuadraticForm | None = None

    def __post_init__(self):
        if self.disc is not None and self.disc.group_order != self.det:
            raise DomainError(
                f"discriminant group order {self.disc.group_order} "
                f"differs from the determinant {self.det}"
            )


def genus_class_count(spec: GenusSpec, threads: int = 1):
    """(class count, representatives) for the genus the spec describes.

    Even lattices of equal signature lie in one genus exactly when their
    discriminant forms are isomorphic.  The form-isomorphism filter runs
    before isometry deduplication: it is the cheaper test and discards
    most of the reduced-shape candidates.
    """
    candidates = _raw_reduced(spec.rank, spec.det, threads=threads)
    if spec.disc is not None:
        candidates = [
            r for r in candidates if are_isomorphic(disc_form(r.lattice()), spec.disc)
        ]
    reps = _dedup_isometry(candidates)
    return len(reps), reps
