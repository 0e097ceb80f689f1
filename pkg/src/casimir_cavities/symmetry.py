"""Signed-permutation point group of the cavity and its fundamental domain.

The cavity walls are the planes x1 = x3, x2 = 0 and x1 = x2.  The three
plane reflections generate a group of 48 signed 3x3 permutation matrices
(24 proper rotations forming the octahedral rotation group, times the
inversion).  All group algebra here is exact integer arithmetic; floats
only enter when matrices act on floating-point vectors.

Everything is immutable after construction: groups can be shared freely
between threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InputError, NotFiniteGroupError

Matrix = tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]

IDENTITY_MATRIX: Matrix = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def _det3(m: Matrix) -> int:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )  # type: ignore[return-value]


def _transpose(m: Matrix) -> Matrix:
    return tuple(tuple(m[j][i] for j in range(3)) for i in range(3))  # type: ignore[return-value]


@dataclass(frozen=True)
class GroupElement:
    """One signed permutation matrix, with exact determinant and trace."""

    matrix: Matrix
    label: str = ""

    def __post_init__(self):
        m = tuple(tuple(int(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        for row in m:
            if sum(abs(v) for v in row) != 1 or any(abs(v) > 1 for v in row):
                raise InputError(f"not a signed permutation matrix: {m}")
        for j in range(3):
            if sum(abs(m[i][j]) for i in range(3)) != 1:
                raise InputError(f"not a signed permutation matrix: {m}")
        if _matmul(m, _transpose(m)) != IDENTITY_MATRIX:
            raise InputError(f"matrix is not orthogonal: {m}")

    @property
    def det(self) -> int:
        return _det3(self.matrix)

    @property
    def trace(self) -> int:
        return self.matrix[0][0] + self.matrix[1][1] + self.matrix[2][2]

    @property
    def is_identity(self) -> bool:
        return self.matrix == IDENTITY_MATRIX

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(_matmul(self.matrix, other.matrix))

    def inverse(self) -> "GroupElement":
        # orthogonal integer matrix: inverse is the transpose
        return GroupElement(_transpose(self.matrix))

    def apply(self, x):
        """Apply to a 3-vector; exact for integer tuples, numpy otherwise."""
        if isinstance(x, tuple) and all(isinstance(v, int) for v in x):
            m = self.matrix
            return tuple(m[i][0] * x[0] + m[i][1] * x[1] + m[i][2] * x[2]
                         for i in range(3))
        return self.as_array() @ np.asarray(x, dtype=float)

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    def __hash__(self):
        return hash(self.matrix)

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.matrix == other.matrix

    def __repr__(self):
        name = self.label or "?"
        return f"GroupElement({name}, det={self.det})"


@dataclass(frozen=True)
class SymmetryGroup:
    """Ordered, multiplication-closed table of group elements."""

    elements: tuple[GroupElement, ...]
    _index: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        idx = {e.matrix: i for i, e in enumerate(self.elements)}
        if len(idx) != len(self.elements):
            raise InputError("duplicate matrices in group table")
        object.__setattr__(self, "_index", idx)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i) -> GroupElement:
        return self.elements[i]

    def __contains__(self, e: GroupElement) -> bool:
        return e.matrix in self._index

    def index_of(self, e: GroupElement) -> int:
        return self._index[e.matrix]

    def is_closed(self) -> bool:
        """Brute-force closure/inverse check over all ordered pairs."""
        for a in self.elements:
            if a.inverse() not in self:
                return False
            for b in self.elements:
                if (a * b) not in self:
                    return False
        return True

    def proper_elements(self) -> tuple[GroupElement, ...]:
        return tuple(e for e in self.elements if e.det == 1)

    def matrices(self) -> np.ndarray:
        """Stacked float array of shape (order, 3, 3); fixed element order."""
        return np.array([e.matrix for e in self.elements], dtype=float)

    def dets(self) -> np.ndarray:
        return np.array([e.det for e in self.elements], dtype=float)


def wedge_reflections() -> list[GroupElement]:
    """Reflections through the three cavity walls x1=x3, x2=0, x1=x2."""
    q1 = GroupElement(((0, 0, 1), (0, 1, 0), (1, 0, 0)), label="q1")
    q2 = GroupElement(((1, 0, 0), (0, -1, 0), (0, 0, 1)), label="q2")
    q3 = GroupElement(((0, 1, 0), (1, 0, 0), (0, 0, 1)), label="q3")
    return [q1, q2, q3]


def coordinate_reflections() -> list[GroupElement]:
    """Reflections through the coordinate planes x2=0, x1=0, x3=0."""
    return [
        GroupElement(((1, 0, 0), (0, -1, 0), (0, 0, 1)), label="i*g2"),
        GroupElement(((-1, 0, 0), (0, 1, 0), (0, 0, 1)), label="i*g5"),
        GroupElement(((1, 0, 0), (0, 1, 0), (0, 0, -1)), label="i*g8"),
    ]


def generate_group(generators, bound: int = 10_000) -> SymmetryGroup:
    """Closure of the generators under multiplication.

    Breadth-first from the identity, generators applied in the given
    order, new elements of each layer sorted lexicographically by matrix
    entries.  The ordering is therefore deterministic.
    """
    identity = GroupElement(IDENTITY_MATRIX, label="e")
    seen = {identity.matrix}
    elements = [identity]
    frontier = [identity]
    while frontier:
        discovered = []
        for e in frontier:
            for g in generators:
                p = e * g
                if p.matrix not in seen:
                    seen.add(p.matrix)
                    discovered.append(p)
                    if len(seen) > bound:
                        raise NotFiniteGroupError(
                            f"not a finite group under bound {bound}")
        discovered.sort(key=lambda el: el.matrix)
        elements.extend(discovered)
        frontier = discovered
    return SymmetryGroup(tuple(elements))


# Rotation table of the 24 proper elements, in the package's fixed index
# order: g0 identity; g1-g3, g4-g6, g7-g9 quarter/half/three-quarter turns
# about the x2, x1, x3 axes; g10-g17 the eight 3-fold rotations about the
# body diagonals; g18-g23 the six 2-fold rotations about face diagonals.
_OCTAHEDRAL_MATRICES: tuple[Matrix, ...] = (
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),      # g0
    ((0, 0, -1), (0, 1, 0), (1, 0, 0)),     # g1
    ((-1, 0, 0), (0, 1, 0), (0, 0, -1)),    # g2
    ((0, 0, 1), (0, 1, 0), (-1, 0, 0)),     # g3
    ((1, 0, 0), (0, 0, -1), (0, 1, 0)),     # g4
    ((1, 0, 0), (0, -1, 0), (0, 0, -1)),    # g5
    ((1, 0, 0), (0, 0, 1), (0, -1, 0)),     # g6
    ((0, -1, 0), (1, 0, 0), (0, 0, 1)),     # g7
    ((-1, 0, 0), (0, -1, 0), (0, 0, 1)),    # g8
    ((0, 1, 0), (-1, 0, 0), (0, 0, 1)),     # g9
    ((0, 0, 1), (1, 0, 0), (0, 1, 0)),      # g10
    ((0, 1, 0), (0, 0, 1), (1, 0, 0)),      # g11
    ((0, 0, 1), (-1, 0, 0), (0, -1, 0)),    # g12
    ((0, -1, 0), (0, 0, -1), (1, 0, 0)),    # g13
    ((0, 0, -1), (-1, 0, 0), (0, 1, 0)),    # g14
    ((0, -1, 0), (0, 0, 1), (-1, 0, 0)),    # g15
    ((0, 0, -1), (1, 0, 0), (0, -1, 0)),    # g16
    ((0, 1, 0), (0, 0, -1), (-1, 0, 0)),    # g17
    ((0, 1, 0), (1, 0, 0), (0, 0, -1)),     # g18
    ((0, -1, 0), (-1, 0, 0), (0, 0, -1)),   # g19
    ((0, 0, 1), (0, -1, 0), (1, 0, 0)),     # g20
    ((0, 0, -1), (0, -1, 0), (-1, 0, 0)),   # g21
    ((-1, 0, 0), (0, 0, 1), (0, 1, 0)),     # g22
    ((-1, 0, 0), (0, 0, -1), (0, -1, 0)),   # g23
)

# axis (integer direction) and turn fraction of each proper rotation,
# used by the table self-check: trace must equal 1 + 2 cos(angle) and
# the axis must be fixed.
OCTAHEDRAL_AXES: tuple[tuple[tuple[int, int, int], Fraction], ...] = (
    ((0, 0, 0), Fraction(0)),
    ((0, 1, 0), Fraction(1, 4)), ((0, 1, 0), Fraction(1, 2)), ((0, 1, 0), Fraction(3, 4)),
    ((1, 0, 0), Fraction(1, 4)), ((1, 0, 0), Fraction(1, 2)), ((1, 0, 0), Fraction(3, 4)),
    ((0, 0, 1), Fraction(1, 4)), ((0, 0, 1), Fraction(1, 2)), ((0, 0, 1), Fraction(3, 4)),
    ((1, 1, 1), Fraction(1, 3)), ((1, 1, 1), Fraction(2, 3)),
    ((1, -1, 1), Fraction(1, 3)), ((1, -1, 1), Fraction(2, 3)),
    ((-1, 1, 1), Fraction(1, 3)), ((-1, 1, 1), Fraction(2, 3)),
    ((1, 1, -1), Fraction(1, 3)), ((1, 1, -1), Fraction(2, 3)),
    ((1, 1, 0), Fraction(1, 2)), ((1, -1, 0), Fraction(1, 2)),
    ((1, 0, 1), Fraction(1, 2)), ((1, 0, -1), Fraction(1, 2)),
    ((0, 1, 1), Fraction(1, 2)), ((0, 1, -1), Fraction(1, 2)),
)

TETRAHEDRAL_INDICES = (0, 2, 5, 8, 10, 11, 12, 13, 14, 15, 16, 17)


def octahedral_table() -> SymmetryGroup:
    """The 24 proper rotations, hard-coded in index order g0..g23."""
    els = tuple(GroupElement(m, label=f"g{i}")
                for i, m in enumerate(_OCTAHEDRAL_MATRICES))
    return SymmetryGroup(els)


def tetrahedral_subgroup() -> SymmetryGroup:
    """Order-12 rotation subgroup (half turns about axes plus 3-folds)."""
    table = octahedral_table()
    return SymmetryGroup(tuple(table[i] for i in TETRAHEDRAL_INDICES))


def full_group() -> SymmetryGroup:
    """The order-48 group: the 24 rotations and their inversion partners.

    Element i < 24 is the rotation g_i; element 24 + i is -g_i, labelled
    ``i*g_i``.  Index order is fixed so downstream sums are reproducible.
    """
    proper = octahedral_table().elements
    improper = tuple(
        GroupElement(tuple(tuple(-v for v in row) for row in e.matrix),
                     label=f"i*{e.label}")
        for e in proper
    )
    return SymmetryGroup(proper + improper)


def in_fundamental_domain(x) -> bool:
    """Closed wedge 0 <= x2 <= x1 <= x3."""
    x1, x2, x3 = (float(v) for v in x)
    return 0.0 <= x2 <= x1 <= x3


def in_open_domain(x) -> bool:
    """Open wedge 0 < x2 < x1 < x3 (off every wall)."""
    x1, x2, x3 = (float(v) for v in x)
    return 0.0 < x2 < x1 < x3


def orbit(group: SymmetryGroup, x, tol: float = 1e-12):
    """Deduplicated set {g x}, returned as a sorted list of tuples.

    Integer inputs are deduplicated exactly; floats within absolute
    tolerance `tol` per component.
    """
    exact = isinstance(x, tuple) and all(isinstance(v, int) for v in x)
    if exact:
        pts = {g.apply(x) for g in group}
        return sorted(pts)
    xa = np.asarray(x, dtype=float)
    images = [tuple(g.as_array() @ xa) for g in group]
    kept: list[tuple] = []
    for p in images:
        if not any(max(abs(p[i] - q[i]) for i in range(3)) <= tol for q in kept):
            kept.append(p)
    return sorted(kept)


def canonicalize(x, group: SymmetryGroup | None = None):
    """Map x into the closed fundamental domain.

    Returns ``(point, element)`` with ``element.apply(x) == point`` and
    ``point`` in the closed domain.  The first matching element in group
    order is chosen, so the result is deterministic; for points whose
    coordinate magnitudes are distinct and nonzero it is unique anyway.
    """
    g48 = group if group is not None else full_group()
    exact = isinstance(x, tuple) and all(isinstance(v, int) for v in x)
    if exact:
        for g in g48:
            y = g.apply(x)
            if 0 <= y[1] <= y[0] <= y[2]:
                return y, g
        raise InputError(f"no image of {x} in the fundamental domain")
    xa = np.asarray(x, dtype=float)
    best = None
    for g in g48:
        y = g.as_array() @ xa
        if 0.0 <= y[1] <= y[0] <= y[2]:
            best = (y, g)
            break
    if best is None:
        # floating-point ties very close to a wall: fall back to sorting
        # magnitudes, then pick the element reproducing that image best.
        s = np.sort(np.abs(xa))
        target = np.array([s[1], s[0], s[2]])
        g = min(g48, key=lambda el: float(np.max(np.abs(el.as_array() @ xa - target))))
        best = (g.as_array() @ xa, g)
    return best


def affine_images(x, a: float, radius: float, group: SymmetryGroup | None = None):
    """All images g x + shift within `radius` of x.

    Shifts run over the translation lattice (2a Z)^3.  Ordered by shift
    lattice index (lexicographic in the integer triple), then by group
    index, so output is deterministic.
    """
    if a <= 0:
        raise InputError("pyramid side a must be positive")
    if radius < 0:
        raise InputError("radius must be nonnegative")
    g48 = group if group is not None else full_group()
    xa = np.asarray(x, dtype=float)
    nmax = int(np.floor((radius + 2.0 * np.linalg.norm(xa)) / (2.0 * a))) + 1
    out = []
    rng = range(-nmax, nmax + 1)
    for n in rng:
        for m in rng:
            for k in rng:
                shift = np.array([2.0 * a * n, 2.0 * a * m, 2.0 * a * k])
                for g in g48:
                    y = g.as_array() @ xa + shift
                    if np.linalg.norm(y - xa) <= radius:
                        out.append((y, g, shift))
    return out


def domain_edge_angles() -> dict[str, float]:
    """Interior dihedral angles of the wedge at its three edges.

    Computed from inward-pointing wall normals, not hard-coded.  Keys
    name the two walls meeting at the edge ('P1' x1=x3, 'P2' x2=0,
    'P3' x1=x2).
    """
    inward = {
        "P1": np.array([-1.0, 0.0, 1.0]) / np.sqrt(2.0),   # x3 >= x1 side
        "P2": np.array([0.0, 1.0, 0.0]),                   # x2 >= 0 side
        "P3": np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0),   # x1 >= x2 side
    }
    pairs = {"P2P3": ("P2", "P3"), "P1P2": ("P1", "P2"), "P1P3": ("P1", "P3")}
    return {
        name: float(np.pi - np.arccos(np.clip(inward[u] @ inward[v], -1.0, 1.0)))
        for name, (u, v) in pairs.items()
    }
