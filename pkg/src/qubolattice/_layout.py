"""Shared low-level machinery for constructive chain layouts.

A planner claims half-cell slots (cell, side, track) for named chains; claims
by two different chains on one slot are construction errors.  Helpers place
triangular clique blocks and route register buses with at most two turns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .embedding import EmbeddingError, MinorEmbedding
from .lattice import LatticeGraph, LatticeSpec, build_lattice, chimera_spec
from .qubo import Qubo


class SlotPlanner:
    """Tracks ownership of s/r tracks per cell while a layout is built."""

    def __init__(self, J: int):
        self.J = J
        self.claims: dict[tuple[int, int, str, int], str] = {}
        self.chains: dict[str, set[tuple[int, int, str, int]]] = {}

    def claim(self, cell: tuple[int, int], side: str, track: int, var: str) -> None:
        if not 0 <= track < self.J:
            raise EmbeddingError(f"track {track} outside K_{{{self.J},{self.J}}} cell")
        key = (cell[0], cell[1], side, track)
        owner = self.claims.get(key)
        if owner is None:
            self.claims[key] = var
            self.chains.setdefault(var, set()).add(key)
        elif owner != var:
            raise EmbeddingError(
                f"layout conflict at cell {cell} {side}{track}: {owner} vs {var}"
            )

    def run_horizontal(self, var: str, track: int, row: int, i_from: int, i_to: int) -> None:
        step = 1 if i_to >= i_from else -1
        for i in range(i_from, i_to + step, step):
            self.claim((i, row), "s", track, var)

    def run_vertical(self, var: str, track: int, col: int, j_from: int, j_to: int) -> None:
        step = 1 if j_to >= j_from else -1
        for j in range(j_from, j_to + step, step):
            self.claim((col, j), "r", track, var)

    def snapshot(self) -> tuple:
        return (dict(self.claims), {k: set(v) for k, v in self.chains.items()})

    def restore(self, snap: tuple) -> None:
        self.claims = dict(snap[0])
        self.chains = {k: set(v) for k, v in snap[1].items()}

    def extent(self) -> tuple[int, int]:
        w = 1 + max((i for (i, _, _, _) in self.claims), default=0)
        h = 1 + max((j for (_, j, _, _) in self.claims), default=0)
        return w, h

    def to_embedding(self, logical: Qubo, alpha: float, L: int | None = None) -> MinorEmbedding:
        """Convert claims into a MinorEmbedding on a square chimera lattice."""
        w, h = self.extent()
        side = max(w, h) if L is None else L
        spec = chimera_spec(self.J, side)
        graph = build_lattice(spec)
        chains: dict[int, frozenset[int]] = {}
        for name, spots in self.chains.items():
            members = set()
            for i, j, s, t in spots:
                members.add(graph.vertex(i, j, t if s == "s" else self.J + t))
            chains[logical.index_of(name)] = frozenset(members)
        return MinorEmbedding(spec, chains, alpha)


def place_clique_block(
    planner: SlotPlanner, origin: tuple[int, int], names: list[str]
) -> int:
    """Triangular clique embedding of the names inside a square block.

    Variable p gets a horizontal arm (s track p % J across row p // J) and a
    vertical arm (r track p % J down column p // J); the arms join in the
    diagonal cell, and any pair of variables meets on an intra-cell edge.
    Returns the block side in cells.
    """
    J = planner.J
    oi, oj = origin
    b = max(1, -(-len(names) // J))
    for p, name in enumerate(names):
        row, track = divmod(p, J)
        planner.run_horizontal(name, track, oj + row, oi, oi + b - 1)
        planner.run_vertical(name, track, oi + row, oj, oj + b - 1)
    return b


def route_bit_down(
    planner: SlotPlanner,
    name: str,
    exit_col: int,
    exit_row: int,
    exit_track: int,
    jog_row: int,
    jog_track: int,
    dest_col: int,
    dest_track: int,
    dest_row: int,
) -> None:
    """Vertical-horizontal-vertical route from a block bottom to a block top."""
    if exit_col == dest_col and exit_track == dest_track:
        planner.run_vertical(name, exit_track, exit_col, exit_row + 1, dest_row - 1)
        return
    planner.run_vertical(name, exit_track, exit_col, exit_row + 1, jog_row)
    planner.run_horizontal(name, jog_track, jog_row, exit_col, dest_col)
    planner.claim((dest_col, jog_row), "r", dest_track, name)
    if jog_row + 1 <= dest_row - 1:
        planner.run_vertical(name, dest_track, dest_col, jog_row + 1, dest_row - 1)


def route_bit_right(
    planner: SlotPlanner,
    name: str,
    exit_col: int,
    exit_row: int,
    exit_track: int,
    jog_col: int,
    jog_track: int,
    dest_row: int,
    dest_track: int,
    dest_col: int,
) -> None:
    """Horizontal-vertical-horizontal route from a block right edge to a block
    left edge."""
    if exit_row == dest_row and exit_track == dest_track:
        planner.run_horizontal(name, exit_track, exit_row, exit_col + 1, dest_col - 1)
        return
    planner.run_horizontal(name, exit_track, exit_row, exit_col + 1, jog_col)
    planner.run_vertical(name, jog_track, jog_col, exit_row, dest_row)
    planner.claim((jog_col, dest_row), "s", dest_track, name)
    if jog_col + 1 <= dest_col - 1:
        planner.run_horizontal(name, dest_track, dest_row, jog_col + 1, dest_col - 1)
