"""Even integral lattices as Gram matrices.

ADE root lattices are built negative definite (diagonal -2, adjacency +1)
with the usual Dynkin labelings: A_n a path, D_n forked at one end, E_n
with the branch node attached to the fourth path node.  Any consistent
labeling gives the same isometry class; fixing one keeps tests
reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DegenerateLatticeError, DomainError
from .intmat import IntMatrix, det_exact, invariant_factors

_ADE_RANK_BOUNDS = {"A": 1, "D": 4, "E": 6}

# Orders of the finite subgroups of SU(2) fixing a point above each
# singularity type: cyclic, binary dihedral, binary tetra/octa/icosahedral.
_STABILIZER_ORDERS = {"E": {6: 24, 7: 48, 8: 120}}

CONFIG_RANK_CAP = 21


@dataclass(frozen=True, order=True)
class RootComponent:
    """One irreducible root-system factor, e.g. A3 or D5."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in _ADE_RANK_BOUNDS:
            raise DomainError(f"unknown root-system kind {self.kind!r}")
        if self.n < _ADE_RANK_BOUNDS[self.kind]:
            raise DomainError(f"{self.kind}{self.n} is below the minimal rank")
        if self.kind == "E" and self.n not in (6, 7, 8):
            raise DomainError(f"E{self.n} does not exist")

    def __str__(self):
        return f"{self.kind}{self.n}"


_TERM_RE = re.compile(r"^(?:(\d+)\*)?([ADE])(\d+)$")


@dataclass(frozen=True)
class ADEConfig:
    """Multiset of root components; the exceptional curves of a quotient.

    The canonical text syntax is comma-separated ``<mult>*<Kind><n>``
    terms, multiplicity 1 omitted: ``A6,2*A3,3*A2,A1``.
    """

    components: tuple

    def __post_init__(self):
        comps = tuple(sorted(self.components, key=lambda c: (-c.n, c.kind)))
        object.__setattr__(self, "components", comps)
        if self.rank > CONFIG_RANK_CAP:
            raise DomainError(
                f"configuration rank {self.rank} exceeds the cap {CONFIG_RANK_CAP}"
            )

    @classmethod
    def parse(cls, text: str) -> "ADEConfig":
        comps = []
        stripped = re.sub(r"\s+", "", text)
        if stripped:
            for term in stripped.split(","):
                m = _TERM_RE.match(term)
                if not m:
                    raise DomainError(f"cannot parse configuration term {term!r}")
                mult = int(m.group(1)) if m.group(1) else 1
                if mult < 1:
                    raise DomainError(f"bad multiplicity in {term!r}")
                comps.extend([RootComponent(m.group(2), int(m.group(3)))] * mult)
        return cls(tuple(comps))

    def __str__(self):
        out = []
        i = 0
        comps = self.components
        while i < len(comps):
            j = i
            while j < len(comps) and comps[j] == comps[i]:
                j += 1
            mult = j - i
            out.append(str(comps[i]) if mult == 1 else f"{mult}*{comps[i]}")
            i = j
        return ",".join(out)

    @property
    def rank(self) -> int:
        return sum(c.n for c in self.components)

    def count(self, kind: str, n: int) -> int:
        return sum(1 for c in self.components if c.kind == kind and c.n == n)


class GramLattice:
    """An integral lattice presented by its Gram matrix."""

    __slots__ = ("gram", "even", "_det")

    def __init__(self, gram: IntMatrix):
        if not isinstance(gram, IntMatrix):
            gram = IntMatrix(gram)
        if not gram.is_symmetric():
            raise DomainError("Gram matrix must be symmetric")
        self.gram = gram
        self.even = all(gram.rows[i][i] % 2 == 0 for i in range(gram.nrows))
        self._det = None

    @property
    def rank(self) -> int:
        return self.gram.nrows

    @property
    def det(self) -> int:
        if self._det is None:
            self._det = det_exact(self.gram)
        return self._det

    def __eq__(self, other):
        return isinstance(other, GramLattice) and self.gram == other.gram

    def __repr__(self):
        return f"GramLattice({self.gram.to_lists()})"


def _ade_edges(kind, n):
    if kind == "A":
        return [(i, i + 1) for i in range(n - 1)]
    if kind == "D":
        return [(i, i + 1) for i in range(n - 3)] + [(n - 3, n - 2), (n - 3, n - 1)]
    # Bourbaki E_n: path 1-3-4-5-...-n with node 2 hanging off node 4.
    path = [1, 3, 4, 5, 6, 7, 8][: n - 1]
    edges = [(a - 1, b - 1) for a, b in zip(path, path[1:])]
    edges.append((2 - 1, 4 - 1))
    return edges


def ade_lattice(c: RootComponent) -> GramLattice:
    """Negative-definite root lattice of the given component."""
    n = c.n
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = -2
    for i, j in _ade_edges(c.kind, n):
        g[i][j] = 1
        g[j][i] = 1
    return GramLattice(IntMatrix(g))


def direct_sum(lattices) -> GramLattice:
    """Block-diagonal sum; the empty sum is the rank-0 lattice (det 1)."""
    lattices = list(lattices)
    total = sum(l.rank for l in lattices)
    g = [[0] * total for _ in range(total)]
    off = 0
    for lat in lattices:
        r = lat.rank
        for i in range(r):
            row = lat.gram.rows[i]
            for j in range(r):
                g[off + i][off + j] = row[j]
        off += r
    return GramLattice(IntMatrix(g))


def config_lattice(config: ADEConfig) -> GramLattice:
    """Direct sum of the root lattices of a configuration."""
    return direct_sum(ade_lattice(c) for c in config.components)


def disc_group(l: GramLattice) -> tuple:
    """Invariant factors (> 1) of the discriminant group, ascending.

    Their product equals |det|.
    """
    if l.rank and l.det == 0:
        raise DegenerateLatticeError("lattice is degenerate")
    return tuple(d for d in invariant_factors(l.gram) if d > 1)


def rescale(l: GramLattice, k: int) -> GramLattice:
    """Multiply the form by a positive integer k."""
    if k <= 0:
        raise DomainError(f"scale factor must be positive, got {k}")
    return GramLattice(IntMatrix([[k * x for x in row] for row in l.gram.rows]))


def det_sign(p: int, q: int) -> int:
    """Sign of the determinant of any nondegenerate lattice of signature (p, q)."""
    if p < 0 or q < 0:
        raise DomainError("signature counts must be nonnegative")
    return -1 if q % 2 else 1


def stabilizer_order(c: RootComponent) -> int:
    """Order of the isotropy group at a point above a singularity of this type."""
    if c.kind == "A":
        return c.n + 1
    if c.kind == "D":
        return 4 * (c.n - 2)
    return _STABILIZER_ORDERS["E"][c.n]


def _definite(l: GramLattice, sign: int) -> bool:
    g = l.gram.rows
    n = l.rank
    for k in range(1, n + 1):
        minor = det_exact(IntMatrix([[sign * g[i][j] for j in range(k)] for i in range(k)]))
        if minor <= 0:
            return False
    return True


def is_negative_definite(l: GramLattice) -> bool:
    """Exact test via leading principal minors of the negated Gram."""
    return _definite(l, -1)


def is_positive_definite(l: GramLattice) -> bool:
    return _definite(l, 1)
