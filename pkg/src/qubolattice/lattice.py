"""Two-dimensional cell-matrix lattice graphs, including the Chimera family.

A lattice is a grid of identical n-vertex cells.  Three 0/1 matrices describe
it: ``A`` gives the intra-cell edges, ``A_h`` connects a cell to its right
neighbor and ``A_v`` to the neighbor below.  No periodic wrap.  The canonical
vertex index of intra-cell vertex ``a`` in cell ``(i, j)`` is
``(i * height + j) * n + a`` so cell coordinates are recoverable by arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np


class LatticeError(ValueError):
    """Invalid lattice parameter."""


def _as_bitmatrix(m, n: int, name: str) -> np.ndarray:
    arr = np.asarray(m, dtype=np.int8)
    if arr.shape != (n, n):
        raise LatticeError(f"{name} must be {n}x{n}")
    if not np.isin(arr, (0, 1)).all():
        raise LatticeError(f"{name} must contain only 0/1 entries")
    return arr


@dataclass(frozen=True)
class CellAdjacency:
    """The repeating n-vertex cell: intra, horizontal, and vertical edges."""

    n: int
    A: tuple[tuple[int, ...], ...]
    A_h: tuple[tuple[int, ...], ...]
    A_v: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_matrices(A, A_h, A_v) -> "CellAdjacency":
        A = np.asarray(A)
        n = A.shape[0]
        A = _as_bitmatrix(A, n, "A")
        A_h = _as_bitmatrix(A_h, n, "A_h")
        A_v = _as_bitmatrix(A_v, n, "A_v")
        if (A != A.T).any():
            raise LatticeError("A must be symmetric")
        if np.diag(A).any():
            raise LatticeError("A must have zero diagonal")
        to_tuple = lambda m: tuple(tuple(int(v) for v in row) for row in m)
        return CellAdjacency(n, to_tuple(A), to_tuple(A_h), to_tuple(A_v))

    @cached_property
    def e(self) -> int:
        """Intra-cell edge count, pairs a < b with A[a][b] = 1."""
        return sum(self.A[a][b] for a in range(self.n) for b in range(a + 1, self.n))

    @cached_property
    def e_h(self) -> int:
        return sum(sum(row) for row in self.A_h)

    @cached_property
    def e_v(self) -> int:
        return sum(sum(row) for row in self.A_v)


def chimera_cell(J: int) -> CellAdjacency:
    """Complete-bipartite K_{J,J} cell.

    Left vertices 0..J-1 carry the horizontal couplers (track-aligned), right
    vertices J..2J-1 the vertical ones.  J=4 reproduces the standard Chimera
    cell with n=8, e=16, e_h=e_v=4.
    """
    if J < 1:
        raise LatticeError("chimera cell requires J >= 1")
    n = 2 * J
    A = np.zeros((n, n), dtype=np.int8)
    A[:J, J:] = 1
    A[J:, :J] = 1
    A_h = np.zeros((n, n), dtype=np.int8)
    for a in range(J):
        A_h[a, a] = 1
    A_v = np.zeros((n, n), dtype=np.int8)
    for a in range(J, n):
        A_v[a, a] = 1
    return CellAdjacency.from_matrices(A, A_h, A_v)


@dataclass(frozen=True)
class LatticeSpec:
    """A cell family plus the grid extents (square ``L`` is the usual case)."""

    cell: CellAdjacency
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise LatticeError("lattice extents must be positive")

    @staticmethod
    def square(cell: CellAdjacency, L: int) -> "LatticeSpec":
        return LatticeSpec(cell, L, L)

    @property
    def L(self) -> int:
        if self.width != self.height:
            raise LatticeError("rectangular lattice has no single side length")
        return self.width

    @property
    def num_vertices(self) -> int:
        return self.cell.n * self.width * self.height


def chimera_spec(J: int, L: int, height: int | None = None) -> LatticeSpec:
    return LatticeSpec(chimera_cell(J), L, L if height is None else height)


class LatticeGraph:
    """Realized vertex/edge set of a LatticeSpec with canonical indexing."""

    def __init__(self, spec: LatticeSpec):
        self.spec = spec
        n = spec.cell.n
        self._n = n
        edges: set[tuple[int, int]] = set()
        A, A_h, A_v = spec.cell.A, spec.cell.A_h, spec.cell.A_v
        for i in range(spec.width):
            for j in range(spec.height):
                base = self.vertex(i, j, 0)
                for a in range(n):
                    for b in range(a + 1, n):
                        if A[a][b]:
                            edges.add((base + a, base + b))
                if i < spec.width - 1:
                    base_r = self.vertex(i + 1, j, 0)
                    for a in range(n):
                        for b in range(n):
                            if A_h[a][b]:
                                edges.add(tuple(sorted((base + a, base_r + b))))
                if j < spec.height - 1:
                    base_d = self.vertex(i, j + 1, 0)
                    for a in range(n):
                        for b in range(n):
                            if A_v[a][b]:
                                edges.add(tuple(sorted((base + a, base_d + b))))
        self.edges: frozenset[tuple[int, int]] = frozenset(edges)
        adj: dict[int, set[int]] = {v: set() for v in range(self.num_vertices)}
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = adj

    @property
    def num_vertices(self) -> int:
        return self.spec.num_vertices

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def vertex(self, i: int, j: int, a: int) -> int:
        """Canonical index of intra-cell vertex a in cell (i, j)."""
        spec = self.spec
        if not (0 <= i < spec.width and 0 <= j < spec.height and 0 <= a < self._n):
            raise LatticeError(f"cell coordinate ({i}, {j}, {a}) out of range")
        return (i * spec.height + j) * self._n + a

    def cell_of(self, v: int) -> tuple[int, int, int]:
        """Inverse of :meth:`vertex`."""
        if not 0 <= v < self.num_vertices:
            raise LatticeError(f"vertex {v} out of range")
        cell, a = divmod(v, self._n)
        i, j = divmod(cell, self.spec.height)
        return i, j, a

    def has_edge(self, u: int, v: int) -> bool:
        return tuple(sorted((u, v))) in self.edges

    def neighbors(self, v: int) -> set[int]:
        if not 0 <= v < self.num_vertices:
            raise LatticeError(f"vertex {v} out of range")
        return set(self._adj[v])

    def average_degree(self) -> float:
        return 2.0 * self.num_edges / self.num_vertices


def build_lattice(spec: LatticeSpec) -> LatticeGraph:
    return LatticeGraph(spec)


def neighbors(g: LatticeGraph, v: int) -> set[int]:
    """Adjacency of a vertex; symmetric by construction."""
    return g.neighbors(v)


@dataclass
class SublatticeView:
    """Induced subgraph on a rectangle of cells, with index remapping."""

    graph: LatticeGraph
    to_parent: list[int]
    from_parent: dict[int, int]


def sublattice(g: LatticeGraph, i0: int, j0: int, r1: int, r2: int) -> SublatticeView:
    """Induced view of the r1 x r2 cell rectangle with corner (i0, j0).

    The rectangle of a cell-matrix lattice is itself a lattice of the same
    family, so the view carries a real LatticeGraph plus the index maps.
    """
    spec = g.spec
    if r1 < 1 or r2 < 1 or i0 < 0 or j0 < 0 or i0 + r1 > spec.width or j0 + r2 > spec.height:
        raise LatticeError("rectangle does not fit inside the lattice")
    sub = LatticeGraph(LatticeSpec(spec.cell, r1, r2))
    to_parent = []
    for i in range(r1):
        for j in range(r2):
            for a in range(spec.cell.n):
                to_parent.append(g.vertex(i0 + i, j0 + j, a))
    from_parent = {p: s for s, p in enumerate(to_parent)}
    return SublatticeView(sub, to_parent, from_parent)


def boundary_edge_count(g: LatticeGraph, i0: int, j0: int, r1: int, r2: int) -> int:
    """Edges of the parent lattice crossing the rectangle boundary."""
    view = sublattice(g, i0, j0, r1, r2)
    inside = set(view.from_parent)
    count = 0
    for u, v in g.edges:
        if (u in inside) != (v in inside):
            count += 1
    return count


def lattice_to_doc(spec: LatticeSpec, family_hint: tuple[str, int] | None = None) -> dict:
    """Serialize; chimera lattices get the compact family form."""
    if family_hint is not None and family_hint[0] == "chimera":
        return {"family": "chimera", "J": family_hint[1], "L": spec.L}
    doc = {
        "n": spec.cell.n,
        "A": [list(r) for r in spec.cell.A],
        "A_h": [list(r) for r in spec.cell.A_h],
        "A_v": [list(r) for r in spec.cell.A_v],
        "L": spec.width,
    }
    if spec.height != spec.width:
        doc["height"] = spec.height
    return doc


def lattice_from_doc(doc: Mapping) -> LatticeSpec:
    if doc.get("family") == "chimera":
        return chimera_spec(int(doc["J"]), int(doc["L"]))
    cell = CellAdjacency.from_matrices(doc["A"], doc["A_h"], doc["A_v"])
    width = int(doc["L"])
    height = int(doc.get("height", width))
    return LatticeSpec(cell, width, height)


def detect_chimera(spec: LatticeSpec) -> int | None:
    """Return J if the cell is exactly the K_{J,J} chimera cell, else None."""
    n = spec.cell.n
    if n % 2 != 0:
        return None
    J = n // 2
    return J if spec.cell == chimera_cell(J) else None
