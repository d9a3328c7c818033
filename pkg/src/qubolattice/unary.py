"""One-hot (unary) constraints as binary merge trees, and their fractal
lattice embeddings.

The naive quadratic form of "exactly one of N bits" couples all pairs.  A
binary tree of pairwise-sum ancillas makes the interaction graph a tree with
O(N) edges; each internal merge can then be realized inside a K_{2,2} block of
a cell by a four-spin gadget, and the whole tree packs into a lattice whose
side grows like sqrt(N) through an H-tree style recursion (side doubles, plus
one corridor row, every time the leaf count quadruples).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .embedding import (
    EmbeddedQubo,
    EmbeddingError,
    MinorEmbedding,
    choose_alpha,
    embed_qubo,
)
from .lattice import LatticeGraph, build_lattice, chimera_spec
from .qubo import BINARY, SPIN, Qubo, QuboBuilder


class UnaryError(ValueError):
    """Invalid unary-constraint parameter."""


# ---------------------------------------------------------------------------
# merge trees


@dataclass
class MergeTree:
    """Binary tree of pairwise sums underneath a one-hot root constraint."""

    children: dict[str, tuple[str, str]]
    root_children: tuple[str, str]
    leaves: list[str]
    real_leaves: list[str]
    slack: str | None = None
    gadgets: list[tuple[str, str, str, str]] = field(default_factory=list)

    @property
    def pad_leaves(self) -> list[str]:
        real = set(self.real_leaves)
        return [x for x in self.leaves if x not in real]

    def internal_nodes(self) -> list[str]:
        return list(self.children)

    def subtree_totals(self, hot_leaf: str | None) -> dict[str, int]:
        """Bit values of every node for a one-hot (or all-zero) pattern."""
        values: dict[str, int] = {leaf: 0 for leaf in self.leaves}
        if hot_leaf is not None:
            values[hot_leaf] = 1

        def total(name: str) -> int:
            if name not in values:
                a, b = self.children[name]
                values[name] = total(a) + total(b)
            return values[name]

        t = total(self.root_children[0]) + total(self.root_children[1])
        if self.slack is not None:
            values[self.slack] = t
        return values


def _complete_merge_tree(N: int, allow_zero: bool = False) -> MergeTree:
    """Pairwise merge tree over leaves x1..x{2^ceil(log2 N)}.

    Subtrees made entirely of padding are dropped (single-child merges
    collapse onto the surviving child); a padding leaf survives only when its
    sibling leaf is real, which keeps the edge count at most 3N.
    """
    n = max(1, math.ceil(math.log2(N)))
    children: dict[str, tuple[str, str]] = {}
    leaves: list[str] = []
    counter = [0]

    def rec(lo: int, hi: int) -> str | None:
        if lo > N:
            return None
        if hi - lo == 1:
            a, b = f"x{lo}", f"x{hi}"
            leaves.extend([a, b])
            counter[0] += 1
            node = f"y{counter[0]}"
            children[node] = (a, b)
            return node
        mid = (lo + hi) // 2
        left = rec(lo, mid)
        right = rec(mid + 1, hi)
        if right is None:
            return left
        counter[0] += 1
        node = f"y{counter[0]}"
        children[node] = (left, right)
        return node

    top = rec(1, 1 << n)
    assert top is not None and top in children
    root_children = children.pop(top)
    real = [f"x{k}" for k in range(1, N + 1)]
    return MergeTree(children, root_children, leaves, real, "y0" if allow_zero else None)


@dataclass
class UnaryTreeQubo:
    """Binary QUBO whose zero-energy states are exactly the one-hot patterns."""

    N: int
    n: int
    qubo: Qubo
    leaf_index: dict[int, int]
    tree: MergeTree

    def edge_count(self) -> int:
        return len(self.qubo.interaction_edges())

    def vertex_count(self) -> int:
        return self.qubo.num_vars


def build_unary_qubo(N: int, allow_zero: bool = False) -> UnaryTreeQubo:
    """Tree QUBO for "exactly one of x1..xN is 1".

    Every internal merge contributes (y - a - b)^2; the root contributes
    (1 - c1 - c2)^2, or (y0 - c1 - c2)^2 with a slack bit when a zero total is
    allowed; padding leaves carry a unit linear penalty.
    """
    if N < 2:
        raise UnaryError("unary constraint needs at least 2 bits")
    tree = _complete_merge_tree(N, allow_zero)
    builder = QuboBuilder(BINARY)
    for name in tree.leaves:
        builder.var(name)
    for node, (a, b) in tree.children.items():
        builder.add_squared_affine(0.0, [(node, 1.0), (a, -1.0), (b, -1.0)])
    c1, c2 = tree.root_children
    if tree.slack is not None:
        builder.add_squared_affine(0.0, [(tree.slack, 1.0), (c1, -1.0), (c2, -1.0)])
    else:
        builder.add_squared_affine(1.0, [(c1, -1.0), (c2, -1.0)])
    for pad in tree.pad_leaves:
        builder.add_linear(pad, 1.0)
    q = builder.build()
    leaf_index = {k: q.index_of(f"x{k}") for k in range(1, N + 1)}
    return UnaryTreeQubo(N, max(1, math.ceil(math.log2(N))), q, leaf_index, tree)


def one_hot_ground_states(ut: UnaryTreeQubo) -> set[tuple[int, ...]]:
    """Independent oracle: enumerate the expected zero-energy assignments."""
    out: set[tuple[int, ...]] = set()
    hot_options: list[str | None] = [f"x{k}" for k in range(1, ut.N + 1)]
    if ut.tree.slack is not None:
        hot_options.append(None)
    for hot in hot_options:
        values = ut.tree.subtree_totals(hot)
        out.add(tuple(values[ut.qubo.name_of(i)] for i in range(ut.qubo.num_vars)))
    return out


# ---------------------------------------------------------------------------
# the K_{2,2} spin gadget


def k22_gadget(z: str, x: str, y: str, w: str) -> Qubo:
    """Spin objective on one K_{2,2} block reproducing the merge z = x + y.

    With z, w on one side and x, y on the other, the couplings z-x, z-y, w-x,
    w-y all fit on K_{2,2} edges.  The minimum-energy projections onto
    (z, x, y) coincide with the minimizers of (s_z - s_x - s_y - 1)^2; the
    offset between the two objectives is a constant -3.
    """
    if len({z, x, y, w}) != 4:
        raise UnaryError("gadget needs four distinct spins")
    b = QuboBuilder(SPIN)
    for name in (z, x, y, w):
        b.var(name)
    b.add_linear(x, 1.0)
    b.add_linear(y, 1.0)
    b.add_linear(z, -1.0)
    b.add_quadratic(z, x, -1.0)
    b.add_quadratic(z, y, -1.0)
    b.add_quadratic(w, x, 1.0)
    b.add_quadratic(w, y, -1.0)
    return b.build()


def _add_gadget(builder: QuboBuilder, z: str, x: str, y: str, w: str) -> None:
    # same terms as k22_gadget, shifted so a satisfied merge contributes 0
    builder.add_offset(3.0)
    builder.add_linear(x, 1.0)
    builder.add_linear(y, 1.0)
    builder.add_linear(z, -1.0)
    builder.add_quadratic(z, x, -1.0)
    builder.add_quadratic(z, y, -1.0)
    builder.add_quadratic(w, x, 1.0)
    builder.add_quadratic(w, y, -1.0)


def _add_bit_constraint(
    builder: QuboBuilder, const_bits: float, spins: list[tuple[str, float]]
) -> None:
    """(const_bits + sum coeff * bit)^2 over spin variables, bit = (1+s)/2."""
    const = const_bits + sum(c / 2.0 for _, c in spins)
    builder.add_squared_affine(const, [(name, c / 2.0) for name, c in spins])


def _add_pad_penalty(builder: QuboBuilder, name: str) -> None:
    builder.add_offset(0.5)
    builder.add_linear(name, 0.5)


# ---------------------------------------------------------------------------
# size predictions


def predicted_unary_length(N: int, J: int, optimized: bool = False) -> float:
    """Closed-form side-length prediction for the fractal unary embedding.

    Unoptimized: L = 2 sqrt(N / J) - 1.  Optimized: the joint recursion
    L <- 2L + 1, N <- 4N + (J - 2) L from (L, N) = (1, J), inverted by
    square-root interpolation between levels; for large N it approaches
    sqrt(12 N / (5 J - 4)).
    """
    if N < 1 or J < 1:
        raise UnaryError("N and J must be positive")
    if not optimized:
        return 2.0 * math.sqrt(N / J) - 1.0
    L, Nm = 1.0, float(J)
    while Nm < N:
        L, Nm = 2 * L + 1, 4 * Nm + (J - 2) * L
    if Nm == N:
        return L
    return L * math.sqrt(N / Nm)


# ---------------------------------------------------------------------------
# fractal layout engine


@dataclass(frozen=True)
class _Frame:
    """Affine placement of a block's local cell coordinates on the lattice."""

    base_i: int
    step_i: int
    base_j: int
    step_j: int

    def cell(self, i: int, j: int) -> tuple[int, int]:
        return self.base_i + self.step_i * i, self.base_j + self.step_j * j

    def sub(self, oi: int, oj: int, size: int, fx: bool, fy: bool) -> "_Frame":
        bi = self.base_i + self.step_i * (oi + size - 1 if fx else oi)
        bj = self.base_j + self.step_j * (oj + size - 1 if fy else oj)
        return _Frame(
            bi, self.step_i * (-1 if fx else 1), bj, self.step_j * (-1 if fy else 1)
        )


_ROOT_FRAME = _Frame(0, 1, 0, 1)


@dataclass
class FractalLayout:
    """Cell-level description of a fractal unary embedding."""

    N_star: int
    L: int
    tile_assignment: dict[str, tuple[int, int]]
    gadget_spins: dict[tuple[int, int], list[dict[str, int]]]
    J: int
    N: int
    leaf_tracks: dict[str, tuple[int, int, int]] = field(default_factory=dict)
    embedded: EmbeddedQubo | None = None
    tree: MergeTree | None = None
    added_bits: int = 0
    notes: list[str] = field(default_factory=list)


class _FractalBuilder:
    """Claims lattice half-cell slots for chains and merge gadgets."""

    def __init__(self, J: int):
        if J < 2:
            raise EmbeddingError("fractal embedding needs K_{2,2} blocks, J >= 2")
        self.J = J
        self.per_cell = 4 if J >= 4 else 2
        self.claims: dict[tuple[int, int, str, int], str] = {}
        self.chains: dict[str, set[tuple[int, int, str, int]]] = {}
        self.leaves: list[str] = []
        self.gadgets: list[tuple[str, str, str, str]] = []
        self.tile_assignment: dict[str, tuple[int, int]] = {}
        self.gadget_spins: dict[tuple[int, int], list[dict[str, int]]] = {}
        self.leaf_tracks: dict[str, tuple[int, int, int]] = {}
        self._node_counter = 0

    # claim bookkeeping ------------------------------------------------------

    def claim(self, cell: tuple[int, int], side: str, track: int, var: str) -> None:
        if not 0 <= track < self.J:
            raise EmbeddingError(f"track {track} outside K_{{{self.J},{self.J}}} cell")
        key = (cell[0], cell[1], side, track)
        if key in self.claims:
            raise EmbeddingError(
                f"layout conflict at cell {cell} {side}{track}: "
                f"{self.claims[key]} vs {var}"
            )
        self.claims[key] = var
        self.chains.setdefault(var, set()).add(key)

    def spot(self, var: str, cell: tuple[int, int]) -> int:
        """Intra-cell vertex index of var's claim inside a cell."""
        for (i, j, side, track), owner in self.claims.items():
            if owner == var and (i, j) == cell:
                return track if side == "s" else self.J + track
        raise EmbeddingError(f"{var} has no claim in cell {cell}")

    def new_node(self, prefix: str = "m") -> str:
        self._node_counter += 1
        return f"{prefix}{self._node_counter}"

    def new_leaf(self) -> str:
        name = f"x{len(self.leaves) + 1}"
        self.leaves.append(name)
        return name

    def merge(self, z: str, x: str, y: str, w: str, cell: tuple[int, int]) -> None:
        self.gadgets.append((z, x, y, w))
        self.tile_assignment.setdefault(z, cell)
        self.gadget_spins.setdefault(cell, []).append(
            {
                "s_z": self.spot(z, cell),
                "s_w": self.spot(w, cell),
                "s_x": self.spot(x, cell),
                "s_y": self.spot(y, cell),
            }
        )

    # cell recipes -------------------------------------------------------------

    def leaf_cell(
        self, cell: tuple[int, int], export_tracks: tuple[int, ...]
    ) -> list[tuple[str, int]]:
        """Fill one cell with leaves plus their in-cell pair merges.

        Returns (name, r-track) for each exported pair sum; the partner track
        inside each {0,1} / {2,3} pair hosts the gadget ancilla.
        """
        exports: list[tuple[str, int]] = []
        for idx in range(self.per_cell // 2):
            a, b = self.new_leaf(), self.new_leaf()
            sa, sb = 2 * idx, 2 * idx + 1
            self.claim(cell, "s", sa, a)
            self.claim(cell, "s", sb, b)
            for leaf, track in ((a, sa), (b, sb)):
                self.tile_assignment[leaf] = cell
                self.leaf_tracks[leaf] = (cell[0], cell[1], track)
            t = export_tracks[idx]
            y, w = self.new_node(), self.new_node("w")
            self.claim(cell, "r", t, y)
            self.claim(cell, "r", t ^ 1, w)
            self.merge(y, a, b, w, cell)
            exports.append((y, t))
        return exports

    def single_cell(self, N: int) -> tuple[str, str]:
        """Top-level layout for N <= leaves-per-cell; returns root children."""
        cell = (0, 0)
        if N == 2:
            a, b = self.new_leaf(), self.new_leaf()
            self.claim(cell, "s", 0, a)
            self.claim(cell, "r", 0, b)
            self.tile_assignment[a] = cell
            self.tile_assignment[b] = cell
            self.leaf_tracks[a] = (cell[0], cell[1], 0)
            return a, b
        if N == 3:
            a, b, c = self.new_leaf(), self.new_leaf(), self.new_leaf()
            self.claim(cell, "r", 0, a)
            self.claim(cell, "r", 1, b)
            y, w = self.new_node(), self.new_node("w")
            self.claim(cell, "s", 0, y)
            self.claim(cell, "s", 1, w)
            self.merge(y, a, b, w, cell)
            self.claim(cell, "r", 2, c)
            for leaf in (a, b, c):
                self.tile_assignment[leaf] = cell
            return y, c
        a, b = self.new_leaf(), self.new_leaf()
        self.claim(cell, "r", 0, a)
        self.claim(cell, "r", 1, b)
        y1, w1 = self.new_node(), self.new_node("w")
        self.claim(cell, "s", 0, y1)
        self.claim(cell, "s", 1, w1)
        self.merge(y1, a, b, w1, cell)
        c, d = self.new_leaf(), self.new_leaf()
        self.claim(cell, "s", 2, c)
        self.claim(cell, "s", 3, d)
        y2, w2 = self.new_node(), self.new_node("w")
        self.claim(cell, "r", 2, y2)
        self.claim(cell, "r", 3, w2)
        self.merge(y2, c, d, w2, cell)
        for leaf in (a, b, c, d):
            self.tile_assignment[leaf] = cell
        return y1, y2

    # recursive blocks ---------------------------------------------------------

    def block(self, m: int, frame: _Frame, export_track: int | None):
        """H-tree block of 4^(m-1) leaf cells on side 2^m - 1.

        With `export_track` set, returns the root node name; its chain ends on
        that r track of the bottom-middle cell ready to continue downward.
        Top-level calls (export_track None) return the two root children.
        """
        if m == 2:
            return self._block2(frame, export_track)
        L_sub = (1 << (m - 1)) - 1
        mid_sub = (L_sub - 1) // 2
        t_down, t_up = (1, 3) if self.per_cell == 4 else (0, 1)
        quads = [
            (0, 0, False, False, t_down),
            (0, L_sub + 1, False, True, t_up),
            (L_sub + 1, 0, True, False, t_down),
            (L_sub + 1, L_sub + 1, True, True, t_up),
        ]
        roots: list[tuple[str, int]] = []
        for oi, oj, fx, fy, track in quads:
            sub = frame.sub(oi, oj, L_sub, fx, fy)
            roots.append((self.block(m - 1, sub, track), track))
        corridor_j = L_sub
        left_cell = frame.cell(mid_sub, corridor_j)
        right_cell = frame.cell(L_sub + 1 + mid_sub, corridor_j)
        center = frame.cell(L_sub, corridor_j)
        for (name, track), cell in zip(
            roots, (left_cell, left_cell, right_cell, right_cell)
        ):
            self.claim(cell, "r", track, name)
        s_zl, s_wl = 0, 1
        s_zr, s_wr = (2, 3) if self.per_cell == 4 else (1, 0)
        zl, wl = self.new_node(), self.new_node("w")
        self.claim(left_cell, "s", s_zl, zl)
        self.claim(left_cell, "s", s_wl, wl)
        self.merge(zl, roots[0][0], roots[1][0], wl, left_cell)
        zr, wr = self.new_node(), self.new_node("w")
        self.claim(right_cell, "s", s_zr, zr)
        self.claim(right_cell, "s", s_wr, wr)
        self.merge(zr, roots[2][0], roots[3][0], wr, right_cell)
        for i in range(mid_sub + 1, L_sub + 1):
            self.claim(frame.cell(i, corridor_j), "s", s_zl, zl)
        for i in range(L_sub + mid_sub, L_sub - 1, -1):
            self.claim(frame.cell(i, corridor_j), "s", s_zr, zr)
        if export_track is None:
            self.claim(center, "r", 0, zl)
            return zl, zr
        root, wroot = self.new_node(), self.new_node("w")
        self.claim(center, "r", export_track, root)
        self.claim(center, "r", export_track ^ (2 if self.per_cell == 4 else 1), wroot)
        self.merge(root, zl, zr, wroot, center)
        L_here = (1 << m) - 1
        for j in range(corridor_j + 1, L_here):
            self.claim(frame.cell(L_sub, j), "r", export_track, root)
        return root

    def _block2(self, frame: _Frame, export_track: int | None):
        if self.per_cell == 4:
            exports = [
                self.leaf_cell(frame.cell(0, 0), (0, 2)),
                self.leaf_cell(frame.cell(0, 2), (1, 3)),
                self.leaf_cell(frame.cell(2, 0), (0, 2)),
                self.leaf_cell(frame.cell(2, 2), (1, 3)),
            ]
            left_cell, right_cell = frame.cell(0, 1), frame.cell(2, 1)
            center, root_cell = frame.cell(1, 1), frame.cell(1, 2)
            for pair, cell in zip(exports, (left_cell, left_cell, right_cell, right_cell)):
                for name, track in pair:
                    self.claim(cell, "r", track, name)
            cell_sums: list[tuple[str, int]] = []
            for pair, cell, s_z, s_w in (
                (exports[0], left_cell, 0, 1),
                (exports[1], left_cell, 2, 3),
                (exports[2], right_cell, 1, 0),
                (exports[3], right_cell, 3, 2),
            ):
                z, w = self.new_node(), self.new_node("w")
                self.claim(cell, "s", s_z, z)
                self.claim(cell, "s", s_w, w)
                self.merge(z, pair[0][0], pair[1][0], w, cell)
                cell_sums.append((z, s_z))
            for z, track in cell_sums:
                self.claim(center, "s", track, z)
            zl, wl = self.new_node(), self.new_node("w")
            self.claim(center, "r", 0, zl)
            self.claim(center, "r", 1, wl)
            self.merge(zl, cell_sums[0][0], cell_sums[1][0], wl, center)
            zr, wr = self.new_node(), self.new_node("w")
            self.claim(center, "r", 2, zr)
            self.claim(center, "r", 3, wr)
            self.merge(zr, cell_sums[2][0], cell_sums[3][0], wr, center)
            self.claim(root_cell, "r", 0, zl)
            self.claim(root_cell, "r", 2, zr)
            if export_track is None:
                self.claim(root_cell, "s", 0, zl)
                return zl, zr
            root, wroot = self.new_node(), self.new_node("w")
            self.claim(root_cell, "s", 0, root)
            self.claim(root_cell, "s", 1, wroot)
            self.merge(root, zl, zr, wroot, root_cell)
            self.claim(root_cell, "r", export_track, root)
            return root
        exports = [
            self.leaf_cell(frame.cell(0, 0), (0,)),
            self.leaf_cell(frame.cell(0, 2), (1,)),
            self.leaf_cell(frame.cell(2, 0), (0,)),
            self.leaf_cell(frame.cell(2, 2), (1,)),
        ]
        left_cell, right_cell, center = frame.cell(0, 1), frame.cell(2, 1), frame.cell(1, 1)
        for (pair, cell) in zip(exports, (left_cell, left_cell, right_cell, right_cell)):
            name, track = pair[0]
            self.claim(cell, "r", track, name)
        zl, wl = self.new_node(), self.new_node("w")
        self.claim(left_cell, "s", 0, zl)
        self.claim(left_cell, "s", 1, wl)
        self.merge(zl, exports[0][0][0], exports[1][0][0], wl, left_cell)
        zr, wr = self.new_node(), self.new_node("w")
        self.claim(right_cell, "s", 1, zr)
        self.claim(right_cell, "s", 0, wr)
        self.merge(zr, exports[2][0][0], exports[3][0][0], wr, right_cell)
        self.claim(center, "s", 0, zl)
        self.claim(center, "s", 1, zr)
        if export_track is None:
            self.claim(center, "r", 0, zl)
            return zl, zr
        root, wroot = self.new_node(), self.new_node("w")
        self.claim(center, "r", export_track, root)
        self.claim(center, "r", export_track ^ 1, wroot)
        self.merge(root, zl, zr, wroot, center)
        self.claim(frame.cell(1, 2), "r", export_track, root)
        return root


def _build_gadget_qubo(
    gadgets: list[tuple[str, str, str, str]],
    root_children: tuple[str, str],
    leaves: list[str],
    real_count: int,
) -> tuple[Qubo, MergeTree]:
    b = QuboBuilder(SPIN)
    for leaf in leaves:
        b.var(leaf)
    children: dict[str, tuple[str, str]] = {}
    for z, x, y, w in gadgets:
        _add_gadget(b, z, x, y, w)
        children[z] = (x, y)
    _add_bit_constraint(b, 1.0, [(root_children[0], -1.0), (root_children[1], -1.0)])
    for pad in leaves[real_count:]:
        _add_pad_penalty(b, pad)
    tree = MergeTree(
        children, root_children, list(leaves), list(leaves[:real_count]), gadgets=list(gadgets)
    )
    return b.build(), tree


def _chains_to_vertices(
    graph: LatticeGraph,
    J: int,
    q: Qubo,
    chains: dict[str, set[tuple[int, int, str, int]]],
) -> dict[int, frozenset[int]]:
    out: dict[int, frozenset[int]] = {}
    for name, spots in chains.items():
        members = set()
        for i, j, side, track in spots:
            a = track if side == "s" else J + track
            members.add(graph.vertex(i, j, a))
        out[q.index_of(name)] = frozenset(members)
    return out


def _finish_layout(builder: _FractalBuilder, root_children: tuple[str, str], N: int, L: int, n_star: int) -> tuple[EmbeddedQubo, FractalLayout]:
    logical, tree = _build_gadget_qubo(builder.gadgets, root_children, builder.leaves, N)
    spec = chimera_spec(builder.J, L)
    graph = build_lattice(spec)
    chains = _chains_to_vertices(graph, builder.J, logical, builder.chains)
    emb = MinorEmbedding(spec, chains, alpha=choose_alpha(logical))
    embedded = embed_qubo(logical, emb)
    layout = FractalLayout(
        N_star=n_star,
        L=L,
        tile_assignment=dict(builder.tile_assignment),
        gadget_spins=dict(builder.gadget_spins),
        J=builder.J,
        N=N,
        leaf_tracks=dict(builder.leaf_tracks),
        embedded=embedded,
        tree=tree,
    )
    capacity = len(builder.leaves)
    layout.notes.append(f"capacity {capacity} leaf slots, {capacity - N} padding")
    return embedded, layout


def fractal_embed_unary(N: int, J: int = 4) -> tuple[EmbeddedQubo, FractalLayout]:
    """Lay the gadgetized unary tree into a chimera(J) lattice.

    Leaves pack four per cell for J >= 4 (two for J in {2, 3}); merges occupy
    K_{2,2} blocks; the recursion quadruples the leaf-cell count while the
    side goes L -> 2L + 1.  For K_{4,4} and N an even power of two this gives
    L = sqrt(N) - 1.
    """
    if N < 2:
        raise UnaryError("unary constraint needs at least 2 bits")
    if J < 2:
        raise EmbeddingError("fractal embedding needs K_{2,2} blocks, J >= 2")
    builder = _FractalBuilder(J)
    per_cell = builder.per_cell
    if N <= per_cell:
        root_children = builder.single_cell(N)
        return _finish_layout(builder, root_children, N, 1, 1)
    m = 2
    while per_cell * 4 ** (m - 1) < N:
        m += 1
    L = (1 << m) - 1
    root_children = builder.block(m, _ROOT_FRAME, None)
    return _finish_layout(builder, root_children, N, L, 4 ** (m - 1))


def lift_one_hot(
    embedded: EmbeddedQubo, tree: MergeTree, hot_leaf: str | None
) -> tuple[int, ...]:
    """Chain-aligned physical spin state for a one-hot (or all-zero) pattern.

    Gadget ancillas take their energy-minimizing sign: -sign(s_x - s_y) when
    the children differ, -1 (free direction) otherwise.
    """
    logical = embedded.logical
    totals = tree.subtree_totals(hot_leaf)
    w_value: dict[str, int] = {}
    for z, x, y, w in tree.gadgets:
        sx, sy = 2 * totals[x] - 1, 2 * totals[y] - 1
        w_value[w] = -1 if sx >= sy else 1
    assignment = []
    for idx in range(logical.num_vars):
        name = logical.name_of(idx)
        if name in w_value:
            assignment.append(w_value[name])
        else:
            assignment.append(2 * totals[name] - 1)
    return embedded.lift(assignment)


def layout_to_doc(layout: FractalLayout) -> dict:
    """Embedding document extended with the node -> cell placement."""
    from .embedding import embedding_to_doc

    if layout.embedded is None:
        raise UnaryError("layout lacks its embedding")
    logical = layout.embedded.logical
    doc = embedding_to_doc(
        layout.embedded.embedding,
        [logical.name_of(i) for i in range(logical.num_vars)],
    )
    doc["layout"] = {name: list(cell) for name, cell in sorted(layout.tile_assignment.items())}
    doc["leaf_cells"] = layout.N_star
    return doc


# ---------------------------------------------------------------------------
# fill-in optimization


def fill_tree_optimize(layout: FractalLayout, J: int | None = None) -> FractalLayout:
    """Grow extra leaf branches into unused cells next to leaf cells.

    A full free cell horizontally adjacent to a leaf cell turns one existing
    leaf into the sum of J - 1 new leaves (net J - 2 extra constrained bits);
    cells with partial capacity host a two-leaf branch (net +1).  K_{2,2}
    cells gain nothing (J - 2 = 0), matching the size recursion
    N -> 4N + (J - 2) L.  Returns a rebuilt layout; if no adjacent capacity
    exists the original layout is returned with a note.
    """
    J = layout.J if J is None else J
    if layout.tree is None or layout.embedded is None:
        raise UnaryError("layout lacks its construction record")
    if J < 4 or layout.J < 4:
        out = _relayout(layout, [], note="no fill possible: J - 2 branch gain is zero")
        return out

    # rebuild the raw claim table from the embedding
    builder = _rebuilder_from(layout)
    branches: list[tuple[str, list[str]]] = []
    used_cells = {(i, j) for (i, j, _, _) in builder.claims}
    leaf_cells = sorted({cell for cell in (layout.tile_assignment[x] for x in layout.tree.real_leaves if x in layout.tile_assignment) if cell is not None})
    replaced: set[str] = set()
    for cell in leaf_cells:
        for di in (-1, 1):
            fcell = (cell[0] + di, cell[1])
            if not (0 <= fcell[0] < layout.L and 0 <= fcell[1] < layout.L):
                continue
            free_s = [t for t in range(J) if (fcell[0], fcell[1], "s", t) not in builder.claims]
            free_r = [t for t in range(J) if (fcell[0], fcell[1], "r", t) not in builder.claims]
            # candidate leaves of this cell, by track
            for leaf in sorted(
                (x for x in layout.tree.real_leaves if layout.leaf_tracks.get(x, (None,))[:2] == cell),
                key=lambda x: layout.leaf_tracks[x][2],
            ):
                if leaf in replaced:
                    continue
                track = layout.leaf_tracks[leaf][2]
                if track not in free_s:
                    continue
                if len(free_s) >= 4 and len(free_r) >= 3:
                    new_names = _branch3(builder, leaf, cell, fcell, track, free_s, free_r)
                elif len(free_s) >= 2 and len(free_r) >= 2:
                    new_names = _branch2(builder, leaf, cell, fcell, track, free_s, free_r)
                else:
                    continue
                replaced.add(leaf)
                branches.append((leaf, new_names))
                used_cells.add(fcell)
                free_s = [t for t in range(J) if (fcell[0], fcell[1], "s", t) not in builder.claims]
                free_r = [t for t in range(J) if (fcell[0], fcell[1], "r", t) not in builder.claims]
                if len(free_s) < 2 or len(free_r) < 2:
                    break
    if not branches:
        out = _relayout(layout, [], note="no free adjacent cells: layout unchanged")
        return out
    return _relayout(layout, branches, builder=builder)


def _rebuilder_from(layout: FractalLayout) -> _FractalBuilder:
    builder = _FractalBuilder(layout.J)
    emb = layout.embedded.embedding
    graph = layout.embedded.embedding.graph
    logical = layout.embedded.logical
    for idx, chain in emb.chains.items():
        name = logical.name_of(idx)
        for p in chain:
            i, j, a = graph.cell_of(p)
            side, track = ("s", a) if a < layout.J else ("r", a - layout.J)
            builder.claim((i, j), side, track, name)
    builder.leaves = list(layout.tree.leaves)
    builder.gadgets = list(layout.tree.gadgets)
    builder.tile_assignment = dict(layout.tile_assignment)
    builder.gadget_spins = {k: list(v) for k, v in layout.gadget_spins.items()}
    builder.leaf_tracks = dict(layout.leaf_tracks)
    builder._node_counter = 1000  # fresh namespace for fill nodes
    return builder


def _branch3(
    builder: _FractalBuilder,
    leaf: str,
    cell: tuple[int, int],
    fcell: tuple[int, int],
    track: int,
    free_s: list[str],
    free_r: list[int],
) -> list[str]:
    """Replace `leaf` by a sum of three new leaves hosted in fcell."""
    s_left = [t for t in free_s if t != track]
    w_prime = s_left[0]
    u_s, v_s = s_left[1], s_left[2]
    t_node_r, w_t_r, p_r = free_r[0], free_r[1], free_r[2]
    builder.claim(fcell, "s", track, leaf)
    new_u, new_v, new_p = builder.new_leaf(), builder.new_leaf(), builder.new_leaf()
    t_node, w_t, w_pr = builder.new_node(), builder.new_node("w"), builder.new_node("w")
    builder.claim(fcell, "s", u_s, new_u)
    builder.claim(fcell, "s", v_s, new_v)
    builder.claim(fcell, "r", p_r, new_p)
    builder.claim(fcell, "r", t_node_r, t_node)
    builder.claim(fcell, "r", w_t_r, w_t)
    builder.claim(fcell, "s", w_prime, w_pr)
    builder.merge(t_node, new_u, new_v, w_t, fcell)
    builder.merge(leaf, t_node, new_p, w_pr, fcell)
    for x in (new_u, new_v, new_p):
        builder.tile_assignment[x] = fcell
    builder.leaf_tracks[new_u] = (fcell[0], fcell[1], u_s)
    builder.leaf_tracks[new_v] = (fcell[0], fcell[1], v_s)
    return [new_u, new_v, new_p]


def _branch2(
    builder: _FractalBuilder,
    leaf: str,
    cell: tuple[int, int],
    fcell: tuple[int, int],
    track: int,
    free_s: list[int],
    free_r: list[int],
) -> list[str]:
    """Replace `leaf` by a sum of two new leaves hosted in fcell."""
    w_prime = next(t for t in free_s if t != track)
    builder.claim(fcell, "s", track, leaf)
    new_u, new_v = builder.new_leaf(), builder.new_leaf()
    w_pr = builder.new_node("w")
    builder.claim(fcell, "r", free_r[0], new_u)
    builder.claim(fcell, "r", free_r[1], new_v)
    builder.claim(fcell, "s", w_prime, w_pr)
    builder.merge(leaf, new_u, new_v, w_pr, fcell)
    for x in (new_u, new_v):
        builder.tile_assignment[x] = fcell
    return [new_u, new_v]


def _relayout(
    layout: FractalLayout,
    branches: list[tuple[str, list[str]]],
    builder: _FractalBuilder | None = None,
    note: str | None = None,
) -> FractalLayout:
    if builder is None:
        out = FractalLayout(
            N_star=layout.N_star,
            L=layout.L,
            tile_assignment=dict(layout.tile_assignment),
            gadget_spins=dict(layout.gadget_spins),
            J=layout.J,
            N=layout.N,
            leaf_tracks=dict(layout.leaf_tracks),
            embedded=layout.embedded,
            tree=layout.tree,
            added_bits=0,
            notes=list(layout.notes) + ([note] if note else []),
        )
        return out
    # constrained bits: old real leaves minus the replaced ones plus new leaves
    replaced = {old for old, _ in branches}
    new_real: list[str] = [x for x in layout.tree.real_leaves if x not in replaced]
    for _, added in branches:
        new_real.extend(added)
    ordered_leaves = [x for x in builder.leaves if x not in replaced]
    pads = [x for x in layout.tree.pad_leaves]
    real_ordered = [x for x in ordered_leaves if x not in set(pads)]
    leaves_for_qubo = real_ordered + pads
    logical, tree = _build_gadget_qubo(
        builder.gadgets, layout.tree.root_children, leaves_for_qubo, len(real_ordered)
    )
    spec = chimera_spec(builder.J, layout.L)
    graph = build_lattice(spec)
    chains = _chains_to_vertices(graph, builder.J, logical, builder.chains)
    emb = MinorEmbedding(spec, chains, alpha=choose_alpha(logical))
    embedded = embed_qubo(logical, emb)
    added = sum(len(v) - 1 for _, v in branches)
    out = FractalLayout(
        N_star=layout.N_star,
        L=layout.L,
        tile_assignment=dict(builder.tile_assignment),
        gadget_spins=dict(builder.gadget_spins),
        J=layout.J,
        N=layout.N + added,
        leaf_tracks=dict(builder.leaf_tracks),
        embedded=embedded,
        tree=tree,
        added_bits=added,
        notes=list(layout.notes) + [f"{len(branches)} branches, +{added} bits"],
    )
    return out
