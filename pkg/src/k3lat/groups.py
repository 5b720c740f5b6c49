"""Finite groups as Cayley tables, element-order censuses, and a brute-force
integral cohomology oracle in degree 3.

The oracle exists to validate record data on small groups; dense Smith
reduction on the cochain spaces of large groups is far out of desk scale,
which is why records carry the order of H^3 as data.
"""

from __future__ import annotations

import re
from collections import deque

import numpy as np

from .errors import DomainError, InconsistentDataError, ResourceLimitError
from .intmat import invariant_factors_of_rows

PERMUTATION_CLOSURE_LIMIT = 10_000
ASSOC_VALIDATION_LIMIT = 1_024
H3_DEFAULT_CAP = 12

_RANK_PRIMES = (8191, 8179, 8171, 8167, 8147)


class FiniteGroup:
    """Finite group on elements 0..N-1 with 0 the identity.

    ``table[i][j]`` is the product i*j.  Tables built from permutation
    generators are associative by construction; raw tables are fully
    validated (identity, latin square, associativity).
    """

    __slots__ = ("table", "order", "_orders")

    def __init__(self, table, _trusted=False):
        table = tuple(tuple(int(x) for x in row) for row in table)
        n = len(table)
        if any(len(row) != n for row in table):
            raise DomainError("Cayley table must be square")
        if n == 0:
            raise DomainError("a group needs at least the identity")
        rng = range(n)
        if any(x < 0 or x >= n for row in table for x in row):
            raise DomainError("Cayley table entries out of range")
        if not _trusted:
            if tuple(table[0]) != tuple(rng) or any(table[i][0] != i for i in rng):
                raise DomainError("element 0 must be the identity")
            for i in rng:
                if sorted(table[i]) != list(rng):
                    raise DomainError(f"row {i} is not a permutation")
            cols = list(zip(*table))
            for j in rng:
                if sorted(cols[j]) != list(rng):
                    raise DomainError(f"column {j} is not a permutation")
            if n > ASSOC_VALIDATION_LIMIT:
                raise ResourceLimitError(
                    f"cannot validate associativity for order {n}; "
                    "construct the group from permutation generators instead"
                )
            t = np.array(table, dtype=np.int64)
            for i in rng:
                if not np.array_equal(t[t[i]], t[i][t]):
                    raise DomainError("Cayley table is not associative")
        self.table = table
        self.order = n
        self._orders = None

    @classmethod
    def cyclic(cls, n):
        if n < 1:
            raise DomainError("cyclic group order must be positive")
        return cls([[(i + j) % n for j in range(n)] for i in range(n)], _trusted=True)

    @classmethod
    def from_permutations(cls, perms, limit=PERMUTATION_CLOSURE_LIMIT):
        """Close a set of permutations (tuples of images) into a group."""
        perms = [tuple(p) for p in perms]
        if not perms:
            raise DomainError("need at least one generator")
        deg = len(perms[0])
        for p in perms:
            if len(p) != deg or sorted(p) != list(range(deg)):
                raise DomainError(f"{p} is not a permutation of 0..{deg - 1}")
        ident = tuple(range(deg))
        index = {ident: 0}
        elems = [ident]
        queue = deque([ident])
        while queue:
            w = queue.popleft()
            for g in perms:
                prod = tuple(g[w[i]] for i in range(deg))
                if prod not in index:
                    if len(elems) >= limit:
                        raise ResourceLimitError(
                            f"group closure exceeded {limit} elements"
                        )
                    index[prod] = len(elems)
                    elems.append(prod)
                    queue.append(prod)
        n = len(elems)
        table = [
            [index[tuple(b[a[i]] for i in range(deg))] for b in elems]
            for a in elems
        ]
        return cls(table, _trusted=True)

    @classmethod
    def from_cycles(cls, cycle_strings, limit=PERMUTATION_CLOSURE_LIMIT):
        """Build from generators in cycle notation, e.g. ["(1,2)", "(1,2,3,4)"]."""
        raw = [_parse_cycles(s) for s in cycle_strings]
        deg = max((max(c) for cycles in raw for c in cycles if c), default=0)
        perms = []
        for cycles in raw:
            p = list(range(deg))
            for cyc in cycles:
                for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                    p[a - 1] = b - 1
            perms.append(tuple(p))
        return cls.from_permutations(perms, limit=limit)

    def element_order(self, i) -> int:
        x = i
        o = 1
        while x != 0:
            x = self.table[x][i]
            o += 1
        return o

    def element_orders(self):
        if self._orders is None:
            self._orders = tuple(self.element_order(i) for i in range(self.order))
        return self._orders


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def _parse_cycles(s):
    stripped = re.sub(r"\s+", "", s)
    if not stripped:
        raise DomainError("empty cycle string")
    if not re.fullmatch(r"(\([^()]*\))+", stripped):
        raise DomainError(f"cannot parse cycle notation {s!r}")
    cycles = []
    seen = set()
    for body in _CYCLE_RE.findall(stripped):
        if not body:
            continue
        try:
            pts = [int(x) for x in body.split(",")]
        except ValueError:
            raise DomainError(f"cannot parse cycle notation {s!r}") from None
        if any(p < 1 for p in pts) or len(set(pts)) != len(pts):
            raise DomainError(f"bad cycle {body!r}")
        if seen & set(pts):
            raise DomainError(f"cycles in {s!r} are not disjoint")
        seen |= set(pts)
        cycles.append(pts)
    return cycles


def order_census(g: FiniteGroup) -> dict:
    """Count of elements by order, for orders >= 2.

    Any element of order above 8 makes the group inadmissible for a
    symplectic action, so that is an error rather than a census entry.
    """
    census = {}
    for o in g.element_orders()[1:]:
        if o > 8:
            raise DomainError(
                f"element of order {o} found: not symplectic-admissible "
                "(element orders must be at most 8)"
            )
        census[o] = census.get(o, 0) + 1
    return dict(sorted(census.items()))


# -- degree-3 integral cohomology oracle ---------------------------------


def _coboundary_rows(table, deg):
    """Sparse rows of the inhomogeneous bar coboundary C^deg -> C^(deg+1).

    Row (g_1..g_{deg+1}) evaluates f(g_2..) - f(g_1 g_2, ..) + ... with
    alternating signs; colliding terms accumulate.
    """
    n = len(table)
    rows = []
    for flat in range(n ** (deg + 1)):
        tup = []
        x = flat
        for _ in range(deg + 1):
            tup.append(x % n)
            x //= n
        tup.reverse()
        row = {}

        def add(cols, coeff):
            idx = 0
            for c in cols:
                idx = idx * n + c
            row[idx] = row.get(idx, 0) + coeff

        add(tup[1:], 1)
        sign = -1
        for i in range(deg):
            merged = tup[:i] + [table[tup[i]][tup[i + 1]]] + tup[i + 2:]
            add(merged, sign)
            sign = -sign
        add(tup[:-1], sign)
        rows.append({c: v for c, v in row.items() if v})
    return rows


def _compose_is_zero(outer_rows, inner_rows):
    for row in outer_rows:
        acc = {}
        for mid, coeff in row.items():
            for col, coeff2 in inner_rows[mid].items():
                acc[col] = acc.get(col, 0) + coeff * coeff2
        if any(v for v in acc.values()):
            return False
    return True


def _rank_mod_p(rows, ncols, p):
    """Rank of the sparse row list over F_p (rows live in Z^ncols).

    Elimination runs on the transpose; with p <= 8191 all products fit
    int32 comfortably.
    """
    arr = np.zeros((ncols, len(rows)), dtype=np.int32)
    for ridx, row in enumerate(rows):
        for c, v in row.items():
            arr[c, ridx] += v
    arr %= p
    nr, nc = arr.shape
    r = 0
    for c in range(nc):
        if r == nr:
            break
        nz = np.nonzero(arr[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            arr[[r, i]] = arr[[i, r]]
        inv = pow(int(arr[r, c]), p - 2, p)
        arr[r, c:] = (arr[r, c:] * inv) % p
        below = np.nonzero(arr[r + 1:, c])[0]
        if below.size:
            idx = r + 1 + below
            factors = arr[idx, c].copy()
            arr[idx, c:] = (arr[idx, c:] - factors[:, None] * arr[r, c:]) % p
        r += 1
    return r


def _xgcd(a, b):
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    return g, x, y


def _rank_exact_sparse(rows):
    """Exact integer rank of a sparse row list; fallback certificate path."""
    pivots = {}
    for row in rows:
        row = dict(row)
        while row:
            c = min(row)
            if c not in pivots:
                pivots[c] = row
                break
            prow = pivots[c]
            a, b = prow[c], row[c]
            if b % a == 0:
                q = b // a
                for col, v in prow.items():
                    nv = row.get(col, 0) - q * v
                    if nv:
                        row[col] = nv
                    else:
                        row.pop(col, None)
            else:
                g, x, y = _xgcd(a, b)
                cols = set(prow) | set(row)
                newp = {}
                newr = {}
                for col in cols:
                    pa = prow.get(col, 0)
                    rb = row.get(col, 0)
                    vp = x * pa + y * rb
                    vr = (a // g) * rb - (b // g) * pa
                    if vp:
                        newp[col] = vp
                    if vr:
                        newr[col] = vr
                pivots[c] = newp
                row = newr
    return len(pivots)


def h3_bar_resolution(g: FiniteGroup, cap: int = H3_DEFAULT_CAP) -> tuple:
    """Invariant factors (> 1) of H^3(G, Z) from the bar cochain complex.

    Computes ker(d3)/im(d2) with integer coefficients: the torsion of the
    quotient equals the nontrivial invariant factors of d2 because the
    kernel of an integer matrix is saturated, and the vanishing of the
    free part is certified by rank(d3) = |G|^3 - rank(d2) (a mod-p rank
    reaching that bound pins the rational rank, since im(d2) inside
    ker(d3) caps it from above).
    """
    n = g.order
    if n > cap:
        raise ResourceLimitError(
            f"group order {n} exceeds the degree-3 cohomology cap {cap}; "
            "supply h3_order as record data instead"
        )
    if n == 1:
        return ()
    d2_rows = _coboundary_rows(g.table, 2)
    d3_rows = _coboundary_rows(g.table, 3)
    if not _compose_is_zero(d3_rows, d2_rows):
        raise InconsistentDataError("d3 composed with d2 is nonzero")
    dense = [[0] * (n * n) for _ in range(n ** 3)]
    for i, row in enumerate(d2_rows):
        for c, v in row.items():
            dense[i][c] = v
    factors = invariant_factors_of_rows(dense, n * n)
    r2 = sum(1 for f in factors if f)
    torsion = tuple(int(f) for f in factors if f > 1)
    target = n ** 3 - r2
    for p in _RANK_PRIMES:
        r3 = _rank_mod_p(d3_rows, n ** 3, p)
        if r3 > target:
            raise InconsistentDataError("rank of d3 exceeds its kernel bound")
        if r3 == target:
            return torsion
    if _rank_exact_sparse(d3_rows) != target:
        raise InconsistentDataError(
            "degree-3 cohomology has positive free rank; not a finite group table"
        )
    return torsion
