"""Tileable embeddings: plan a grid of tiles for a logical graph, then stitch
per-tile Hamiltonians into one lattice objective.

A plan assigns each grid tile a role: a vertex tile (hosting that vertex's
building-block Hamiltonian), a crossing tile (letting one vertex's chain pass
horizontally while another passes vertically, which encodes nonplanarity), or
empty.  Every logical edge is realized by exactly one adjacent tile pair.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .embedding import EmbeddedQubo, EmbeddingError, MinorEmbedding
from .lattice import LatticeSpec, build_lattice, chimera_spec, detect_chimera
from .qubo import SPIN, Qubo, QuboBuilder, normalize_couplings

VERTEX, CROSSING, EMPTY = "v", "x", "-"


class TilingError(ValueError):
    """Plan construction or stitching failed."""


@dataclass
class TilePlan:
    """Grid of tile roles plus the bookkeeping to stitch them."""

    tile_side: int
    grid: list[list[str]]  # row-major; entries "v<k>", "x", "-"
    num_vertices: int
    crossing_passes: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)
    adjacency_realization: dict[
        tuple[int, int], tuple[tuple[int, int], tuple[int, int]]
    ] = field(default_factory=dict)

    @property
    def rows(self) -> int:
        return len(self.grid)

    @property
    def cols(self) -> int:
        return len(self.grid[0]) if self.grid else 0

    @property
    def grid_side(self) -> int:
        return max(self.rows, self.cols)

    def role(self, r: int, c: int) -> str:
        if 0 <= r < self.rows and 0 <= c < self.cols:
            return self.grid[r][c]
        return EMPTY

    def vertex_tiles(self, v: int) -> set[tuple[int, int]]:
        tag = f"v{v}"
        return {
            (r, c)
            for r in range(self.rows)
            for c in range(self.cols)
            if self.grid[r][c] == tag
        }

    def region_with_crossings(self, v: int) -> set[tuple[int, int]]:
        """Vertex tiles plus the crossing tiles its chain passes through."""
        out = self.vertex_tiles(v)
        for tile, (hv, vv) in self.crossing_passes.items():
            if hv == v or vv == v:
                out.add(tile)
        return out

    def crossings(self) -> set[tuple[int, int]]:
        return set(self.crossing_passes)


def _region_connected(plan: TilePlan, v: int) -> bool:
    tiles = plan.region_with_crossings(v)
    if not tiles:
        return False
    start = min(tiles)
    seen = {start}
    frontier = [start]
    while frontier:
        r, c = frontier.pop()
        for dr, dc in ((0, 1), (0, -1), (1, 0), (-1, 0)):
            nxt = (r + dr, c + dc)
            if nxt not in tiles or nxt in seen:
                continue
            # a crossing only conducts its matching direction
            for tile in (nxt, (r, c)):
                if tile in plan.crossing_passes:
                    hv, vv = plan.crossing_passes[tile]
                    if dr == 0 and hv != v:
                        break
                    if dc == 0 and vv != v:
                        break
            else:
                seen.add(nxt)
                frontier.append(nxt)
    return seen == tiles


def validate_plan(plan: TilePlan, edges: Iterable[tuple[int, int]]) -> list[str]:
    """Structural checks; returns a list of violation strings."""
    problems: list[str] = []
    for v in range(plan.num_vertices):
        if not plan.vertex_tiles(v):
            problems.append(f"vertex {v} has no tile")
        elif not _region_connected(plan, v):
            problems.append(f"vertex {v} region disconnected")
    for tile, (hv, vv) in plan.crossing_passes.items():
        r, c = tile
        if plan.role(r, c) != CROSSING:
            problems.append(f"pass recorded at non-crossing tile {tile}")
        ived = {plan.role(r, c - 1), plan.role(r, c + 1)}
        if not ived <= {f"v{hv}", CROSSING}:
            problems.append(f"crossing {tile} horizontal pass of v{hv} dead-ends")
        tved = {plan.role(r - 1, c), plan.role(r + 1, c)}
        if not tved <= {f"v{vv}", CROSSING}:
            problems.append(f"crossing {tile} vertical pass of v{vv} dead-ends")
    edge_list = sorted({tuple(sorted(e)) for e in edges})
    for u, v in edge_list:
        if (u, v) not in plan.adjacency_realization:
            problems.append(f"edge ({u}, {v}) not realized")
            continue
        t1, t2 = plan.adjacency_realization[(u, v)]
        if abs(t1[0] - t2[0]) + abs(t1[1] - t2[1]) != 1:
            problems.append(f"edge ({u}, {v}) realized at non-adjacent tiles")
        roles = {plan.role(*t1), plan.role(*t2)}
        if roles != {f"v{u}", f"v{v}"}:
            problems.append(f"edge ({u}, {v}) realized at wrong tiles {roles}")
    extra = set(plan.adjacency_realization) - set(edge_list)
    if extra:
        problems.append(f"spurious edge realizations {sorted(extra)}")
    return problems


def _assign_realizations(plan: TilePlan, edges: Iterable[tuple[int, int]]) -> None:
    for u, v in sorted({tuple(sorted(e)) for e in edges}):
        tu, tv = plan.vertex_tiles(u), plan.vertex_tiles(v)
        candidates = []
        for (r, c) in tu:
            for nxt in ((r, c + 1), (r + 1, c), (r, c - 1), (r - 1, c)):
                if nxt in tv:
                    candidates.append(tuple(sorted(((r, c), nxt))))
        if not candidates:
            raise TilingError(f"no adjacent tile pair realizes edge ({u}, {v})")
        plan.adjacency_realization[(u, v)] = min(candidates)


def _grid(rows: int, cols: int) -> list[list[str]]:
    return [[EMPTY] * cols for _ in range(rows)]


def _canned_complete_plan(n: int, tile_side: int) -> TilePlan | None:
    layouts = {
        1: ["0"],
        2: ["01"],
        3: ["01", "22"],
        4: ["000", "132", "112"],
        5: ["0004", "1324", "1x14", "-344"],
    }
    if n not in layouts:
        return None
    grid = []
    for row in layouts[n]:
        out = []
        for ch in row:
            if ch == "x":
                out.append(CROSSING)
            elif ch == "-":
                out.append(EMPTY)
            else:
                out.append(f"v{ch}")
        grid.append(out)
    plan = TilePlan(tile_side, grid, n)
    if n == 5:
        plan.crossing_passes[(2, 1)] = (1, 3)  # v1 passes horizontally, v3 vertically
    return plan


def _path_order(n: int, edges: set[tuple[int, int]]) -> list[int] | None:
    """Vertex order if the graph is a simple path, else None."""
    if len(edges) != n - 1:
        return None
    adj: dict[int, list[int]] = {v: [] for v in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    degs = sorted(len(a) for a in adj.values())
    if n == 1:
        return [0]
    if degs[-1] > 2 or degs.count(1) != 2:
        return None
    start = min(v for v in adj if len(adj[v]) == 1)
    order = [start]
    prev = None
    while len(order) < n:
        nxts = [w for w in adj[order[-1]] if w != prev]
        if len(nxts) != 1:
            return None
        prev = order[-1]
        order.append(nxts[0])
    return order


def _cycle_order(n: int, edges: set[tuple[int, int]]) -> list[int] | None:
    if n < 3 or len(edges) != n:
        return None
    adj: dict[int, list[int]] = {v: [] for v in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    if any(len(a) != 2 for a in adj.values()):
        return None
    order = [0, min(adj[0])]
    seen = set(order)
    while len(order) < n:
        nxts = [w for w in adj[order[-1]] if w != order[-2]]
        if not nxts or nxts[0] in seen:
            return None
        order.append(nxts[0])
        seen.add(nxts[0])
    return order if order[0] in adj[order[-1]] else None


def _ladder_plan(n: int, edges: set[tuple[int, int]], tile_side: int) -> TilePlan:
    """Deterministic row/column construction with pass-down crossings.

    Vertices in degree-descending order get one horizontal segment each (the
    two first share the top row); a vertex with edges further down descends
    through a dedicated column, crossing later rows, and realizes each edge
    from a stub next to its descent.  For K_N this stays within a
    (2N - 3) x (2N - 3) grid.
    """
    order = sorted(range(n), key=lambda v: (-sum(1 for e in edges if v in e), v))
    rank = {v: k for k, v in enumerate(order)}
    later: dict[int, list[int]] = {k: [] for k in range(n)}
    for u, v in edges:
        lo, hi = sorted((rank[u], rank[v]))
        later[lo].append(hi)
    for k in later:
        later[k].sort()

    def row_of(k: int) -> int:
        # ranks 0 and 1 split the top row; every later rank gets a row with a
        # drop row above it for stubs and descent tiles
        return 0 if k <= 1 else 2 * k - 2

    rows = row_of(n - 1) + 1
    cells: dict[tuple[int, int], str] = {}
    passes: dict[tuple[int, int], tuple[int, int]] = {}
    width = 1

    def put(r: int, c: int, tag: str):
        nonlocal width
        existing = cells.get((r, c))
        if existing is not None and existing != tag:
            raise TilingError(f"ladder conflict at {(r, c)}: {existing} vs {tag}")
        cells[(r, c)] = tag
        width = max(width, c + 1)

    reach = {k: 0 for k in range(n)}
    next_col = 0
    for k in range(n):
        targets = [kk for kk in later[k] if row_of(kk) > row_of(k)]
        vk = order[k]
        if not targets:
            continue
        last = targets[-1]
        has_stub = any(kk != last for kk in targets)
        if has_stub:
            scol, dcol = next_col, next_col + 1
            next_col += 2
        else:
            # keep descent columns off the grid edge so crossings stay interior
            next_col = max(next_col, 1)
            scol, dcol = None, next_col
            next_col += 1
        reach[k] = max(reach[k], dcol)
        for kk in range(k + 1, last + 1):
            rr = row_of(kk)
            if rr <= row_of(k):
                continue
            put(rr - 1, dcol, f"v{vk}")
            if kk in targets and kk != last:
                put(rr - 1, scol, f"v{vk}")
                reach[kk] = max(reach[kk], scol)
            if kk == last:
                reach[kk] = max(reach[kk], dcol)
            else:
                cells[(rr, dcol)] = CROSSING
                passes[(rr, dcol)] = (order[kk], vk)
                width = max(width, dcol + 1)
                reach[kk] = max(reach[kk], dcol + 1)
    for k in range(n):
        r = row_of(k)
        start = (reach[0] + 1) if (k == 1 and n > 1) else 0
        for c in range(start, max(reach[k], start) + 1):
            if cells.get((r, c)) == CROSSING:
                continue
            put(r, c, f"v{order[k]}")
    grid = _grid(rows, width)
    for (r, c), tag in cells.items():
        grid[r][c] = tag
    plan = TilePlan(tile_side, grid, n)
    plan.crossing_passes = passes
    return plan


def route_graph_to_tiles(
    edges: Iterable[tuple[int, int]], tile_side: int = 1, num_vertices: int | None = None
) -> TilePlan:
    """Deterministic constructive tile plan for an arbitrary simple graph.

    Paths and cycles lay out directly; complete graphs up to K5 use minimal
    verified patterns (K5 in a 4x4 grid with one crossing tile); everything
    else falls back to a row/column ladder with crossings that stays within
    2N - 3 tiles per side.
    """
    edge_set = {tuple(sorted(e)) for e in edges}
    for u, v in edge_set:
        if u == v:
            raise TilingError("self loops are not allowed")
    n = num_vertices
    if n is None:
        n = 1 + max((max(e) for e in edge_set), default=0)
    if n < 1:
        raise TilingError("need at least one vertex")
    complete = len(edge_set) == n * (n - 1) // 2 and n * (n - 1) // 2 > 0 or n == 1
    plan: TilePlan | None = None
    if complete:
        plan = _canned_complete_plan(n, tile_side)
    if plan is None:
        order = _path_order(n, edge_set)
        if order is not None:
            grid = [[f"v{v}" for v in order]]
            plan = TilePlan(tile_side, grid, n)
    if plan is None:
        order = _cycle_order(n, edge_set)
        if order is not None:
            half = (n + 1) // 2
            top = order[:half]
            bottom = order[half:][::-1]
            while len(bottom) < half:
                bottom.append(bottom[-1] if bottom else top[-1])
            grid = [[f"v{v}" for v in top], [f"v{v}" for v in bottom]]
            plan = TilePlan(tile_side, grid, n)
    if plan is None:
        plan = _ladder_plan(n, edge_set, tile_side)
    _assign_realizations(plan, edge_set)
    problems = validate_plan(plan, edge_set)
    if problems:
        raise TilingError("; ".join(problems))
    return plan


# ---------------------------------------------------------------------------
# tile Hamiltonians and stitching


@dataclass
class TileHamiltonians:
    """Spin templates over named tile slots.

    Slot names follow "<tile>:<side><track>:<m>:<n>" with tile "a" or "b",
    side "s" or "r", and (m, n) the cell inside the ell x ell tile (m
    horizontal).  Edge and chain templates span two tiles; "a" is the left
    (or top) one.  `colors` maps each logical color to its chain slots inside
    one tile.
    """

    J: int
    ell: int
    q: int
    vertex_tile: Qubo
    edge_horizontal: Qubo
    edge_vertical: Qubo
    chain_horizontal: Qubo
    chain_vertical: Qubo
    colors: dict[int, list[str]]
    crossing: Qubo | None = None


def crossing_tile_chimera(J: int = 4) -> Qubo:
    """Turn-style crossing template for one K_{J,J} cell.

    Two disjoint four-spin ferromagnetic paths thread the cell: one enters on
    a horizontal coupler and leaves on a vertical one, the other the reverse.
    Ground states are the four per-chain-aligned sign choices; the gap is 2
    (an end flip breaks one unit bond).
    """
    if J < 4:
        raise TilingError("the paired-turn crossing needs J >= 4")
    b = QuboBuilder(SPIN)
    chain_a = ["a:s0:0:0", "a:r0:0:0", "a:s1:0:0", "a:r1:0:0"]
    chain_b = ["a:r2:0:0", "a:s2:0:0", "a:r3:0:0", "a:s3:0:0"]
    for chain in (chain_a, chain_b):
        for u, v in zip(chain, chain[1:]):
            b.add_quadratic(u, v, -1.0)
    return b.build()


def _slot_vertex(graph, J: int, name: str, origins: Mapping[str, tuple[int, int]], ell: int):
    tile, slot, m, n = name.split(":")
    side, track = slot[0], int(slot[1:])
    oi, oj = origins[tile]
    a = track if side == "s" else J + track
    return graph.vertex(oi + int(m), oj + int(n), a)


def _instantiate(
    physical: Qubo,
    pos: dict[int, int],
    graph,
    J: int,
    ell: int,
    template: Qubo,
    origins: Mapping[str, tuple[int, int]],
) -> None:
    physical.add_offset(template.offset)
    for i, c in template.linear.items():
        v = _slot_vertex(graph, J, template.name_of(i), origins, ell)
        physical.add_linear(pos[v], c)
    for (i, j), c in template.quadratic.items():
        vi = _slot_vertex(graph, J, template.name_of(i), origins, ell)
        vj = _slot_vertex(graph, J, template.name_of(j), origins, ell)
        physical.add_quadratic(pos[vi], pos[vj], c)


def stitch(
    plan: TilePlan,
    tiles: TileHamiltonians,
    lattice: LatticeSpec | None = None,
    normalize: bool = False,
) -> EmbeddedQubo:
    """Assemble per-tile templates into one physical objective.

    Vertex tiles get the vertex template; each logical edge gets one edge
    template at its realized tile pair; chains propagate between same-vertex
    tiles and straight through crossings.  The logical view of the result is
    the chain-contracted objective over (vertex, color) variables.
    """
    J, ell = tiles.J, tiles.ell
    if lattice is None:
        lattice = chimera_spec(J, ell * plan.grid_side)
    if lattice.width < ell * plan.cols or lattice.height < ell * plan.rows:
        raise TilingError("lattice too small for the plan")
    graph = build_lattice(lattice)

    def origin(tile: tuple[int, int]) -> tuple[int, int]:
        r, c = tile
        return (c * ell, r * ell)

    # chains: (vertex, color) -> set of physical vertices
    chain_sets: dict[tuple[int, int], set[int]] = {}

    def add_chain_spots(v: int, tile: tuple[int, int], colors: Iterable[int], sides: str):
        oi, oj = origin(tile)
        for color in colors:
            members = chain_sets.setdefault((v, color), set())
            for name in tiles.colors[color]:
                t, slot, m, n = name.split(":")
                side, track = slot[0], int(slot[1:])
                if side not in sides:
                    continue
                a = track if side == "s" else J + track
                members.add(graph.vertex(oi + int(m), oj + int(n), a))

    for v in range(plan.num_vertices):
        for tile in plan.vertex_tiles(v):
            add_chain_spots(v, tile, tiles.colors, "sr")
    for tile, (hv, vv) in plan.crossing_passes.items():
        add_chain_spots(hv, tile, tiles.colors, "s")
        add_chain_spots(vv, tile, tiles.colors, "r")

    order = sorted(set().union(*chain_sets.values())) if chain_sets else []
    pos = {p: k for k, p in enumerate(order)}
    physical = Qubo(SPIN, len(order), var_names=[str(p) for p in order])

    for v in range(plan.num_vertices):
        for tile in sorted(plan.vertex_tiles(v)):
            _instantiate(physical, pos, graph, J, ell, tiles.vertex_tile, {"a": origin(tile)})

    # chains between adjacent region tiles (vertex or crossing)
    for v in range(plan.num_vertices):
        region = plan.region_with_crossings(v)
        for (r, c) in sorted(region):
            right = (r, c + 1)
            if right in region and _conducts(plan, (r, c), v, "h") and _conducts(plan, right, v, "h"):
                _instantiate(
                    physical, pos, graph, J, ell, tiles.chain_horizontal,
                    {"a": origin((r, c)), "b": origin(right)},
                )
            down = (r + 1, c)
            if down in region and _conducts(plan, (r, c), v, "v") and _conducts(plan, down, v, "v"):
                _instantiate(
                    physical, pos, graph, J, ell, tiles.chain_vertical,
                    {"a": origin((r, c)), "b": origin(down)},
                )

    for (u, v), (t1, t2) in sorted(plan.adjacency_realization.items()):
        horizontal = t1[0] == t2[0]
        template = tiles.edge_horizontal if horizontal else tiles.edge_vertical
        _instantiate(physical, pos, graph, J, ell, template, {"a": origin(t1), "b": origin(t2)})

    chains = {
        (v * tiles.q + color): frozenset(members)
        for (v, color), members in chain_sets.items()
    }
    names = [f"v{v}:c{color}" for v in range(plan.num_vertices) for color in range(tiles.q)]
    emb = MinorEmbedding(lattice, chains, alpha=1.0)
    placeholder = Qubo(SPIN, plan.num_vertices * tiles.q, var_names=names)
    embedded = EmbeddedQubo(physical, emb, placeholder, order)
    embedded.logical = embedded.chain_intact_qubo()
    if normalize:
        normalized, scale = normalize_couplings(physical)
        embedded.physical = normalized
        embedded.logical = embedded.chain_intact_qubo()
    return embedded


def _conducts(plan: TilePlan, tile: tuple[int, int], v: int, direction: str) -> bool:
    role = plan.role(*tile)
    if role == f"v{v}":
        return True
    if role == CROSSING:
        hv, vv = plan.crossing_passes[tile]
        return hv == v if direction == "h" else vv == v
    return False


# ---------------------------------------------------------------------------
# supertiles


def supertile_compose(
    e1: EmbeddedQubo,
    e2: EmbeddedQubo,
    couplings: Sequence[tuple[int, float]],
) -> EmbeddedQubo:
    """Interleave two embedded problems on a doubled lattice.

    The first problem's cells map to the upper-left quadrant of each 2x2
    supertile, the second to the lower-right; existing couplers re-route
    through the off-diagonal quadrants on their own tracks.  Each requested
    coupling (i, A_i) lands on an intra-cell edge of the upper-right square of
    a supertile where variable i of both problems is present.
    """
    spec1, spec2 = e1.embedding.lattice, e2.embedding.lattice
    if spec1.cell != spec2.cell or spec1.width != spec2.width or spec1.height != spec2.height:
        raise TilingError("supertile composition needs matching lattices")
    J = detect_chimera(spec1)
    if J is None:
        raise TilingError("supertile composition implemented for chimera cells")
    L = spec1.width
    big = chimera_spec(J, 2 * L)
    graph = build_lattice(big)
    g1 = e1.embedding.graph

    used: dict[int, tuple[str, int]] = {}

    def map_chain(e: EmbeddedQubo, shift: tuple[int, int], tag: str) -> dict[int, set[int]]:
        out: dict[int, set[int]] = {}
        g = e.embedding.graph
        for v, chain in e.embedding.chains.items():
            members: set[int] = set()
            spots = sorted(chain)
            for p in spots:
                i, j, a = g.cell_of(p)
                big_v = graph.vertex(2 * i + shift[0], 2 * j + shift[1], a)
                members.add(big_v)
                used[big_v] = (tag, v)
            # bridge the now-stretched couplers through off-diagonal cells
            for p in spots:
                i, j, a = g.cell_of(p)
                for qv in g.neighbors(p):
                    if qv not in chain or qv < p:
                        continue
                    qi, qj, qa = g.cell_of(qv)
                    if qi == i + 1:  # horizontal hop: pass through (2i+1+si, 2j+sj)
                        mid = graph.vertex(2 * i + 1 + shift[0], 2 * j + shift[1], a)
                        members.add(mid)
                        used[mid] = (tag, v)
                    elif qj == j + 1:
                        mid = graph.vertex(2 * i + shift[0], 2 * j + 1 + shift[1], a)
                        members.add(mid)
                        used[mid] = (tag, v)
            out[v] = members
        return out

    chains1 = map_chain(e1, (0, 0), "x")
    chains2 = map_chain(e2, (1, 1), "y")

    q1, q2 = e1.logical, e2.logical
    if q1.domain != q2.domain:
        raise TilingError("logical domains differ")
    combined = Qubo(q1.domain, q1.num_vars + q2.num_vars, q1.offset + q2.offset)
    combined.var_names = [f"x{i}" for i in range(q1.num_vars)] + [
        f"y{i}" for i in range(q2.num_vars)
    ]
    for i, c in q1.linear.items():
        combined.add_linear(i, c)
    for (i, j), c in q1.quadratic.items():
        combined.add_quadratic(i, j, c)
    off = q1.num_vars
    for i, c in q2.linear.items():
        combined.add_linear(off + i, c)
    for (i, j), c in q2.quadratic.items():
        combined.add_quadratic(off + i, off + j, c)

    # bridge the requested couplings through upper-right off-diagonal squares
    for i, a_i in couplings:
        if i not in chains1 or i not in chains2:
            raise TilingError(f"no shared variable index {i} to couple")
        cells1 = {g1.cell_of(p)[:2] for p in e1.embedding.chains[i]}
        cells2 = {e2.embedding.graph.cell_of(p)[:2] for p in e2.embedding.chains[i]}
        common = sorted(cells1 & cells2)
        if not common:
            raise TilingError(f"variable {i} shares no supertile position")
        ci, cj = common[0]
        bridge = (2 * ci + 1, 2 * cj)
        # chain 1 exits rightward on an s track, chain 2 upward on an r track
        s_track = _track_into_bridge(
            e1, graph, used, chains1[i], ("x", i), (2 * ci, 2 * cj), (ci, cj), True
        )
        r_track = _track_into_bridge(
            e2, graph, used, chains2[i], ("y", i), (2 * ci + 1, 2 * cj + 1), (ci, cj), False
        )
        for track, owner, members in (
            (s_track, ("x", i), chains1[i]),
            (J + r_track, ("y", i), chains2[i]),
        ):
            bv = graph.vertex(bridge[0], bridge[1], track)
            if used.get(bv, owner) != owner:
                raise TilingError(f"bridge congestion at cell {bridge}")
            used[bv] = owner
            members.add(bv)
        combined.add_quadratic(i, off + i, a_i)

    chains = {v: frozenset(m) for v, m in chains1.items()}
    chains.update({off + v: frozenset(m) for v, m in chains2.items()})
    alpha = max(e1.embedding.alpha, e2.embedding.alpha, 1.0 + max(
        (abs(a) for _, a in couplings), default=0.0
    ))
    emb = MinorEmbedding(big, chains, alpha)
    from .embedding import embed_qubo

    return embed_qubo(combined, emb)


def _track_into_bridge(e, graph, used, members, owner, big_cell, small_cell, want_s):
    """Track on which a chain can step from its quadrant cell into the bridge.

    Couplers are track-aligned, so the chain must own (or gain, via an
    intra-cell hop) a spin of the right side in its copy of the shared cell.
    Returns the track index within the side.
    """
    g = e.embedding.graph
    J = g.spec.cell.n // 2
    tracks = sorted(
        a for p in members
        for (i, j, a) in (graph.cell_of(p),)
        if (i, j) == big_cell and (a < J) == want_s
    )
    if tracks:
        return tracks[0] if want_s else tracks[0] - J
    # hop onto a free spin of the needed side inside the quadrant cell
    for t in range(J):
        a = t if want_s else J + t
        bv = graph.vertex(big_cell[0], big_cell[1], a)
        if bv not in used:
            used[bv] = owner
            members.add(bv)
            return t
    raise TilingError(f"no free {'s' if want_s else 'r'} track in cell {big_cell}")


# ---------------------------------------------------------------------------
# documents


def plan_to_doc(plan: TilePlan) -> dict:
    return {
        "tile_side": plan.tile_side,
        "grid": [list(row) for row in plan.grid],
        "edges": [
            [u, v, list(t1), list(t2)]
            for (u, v), (t1, t2) in sorted(plan.adjacency_realization.items())
        ],
        "crossings": [
            [list(tile), hv, vv] for tile, (hv, vv) in sorted(plan.crossing_passes.items())
        ],
    }


def plan_from_doc(doc: Mapping) -> TilePlan:
    grid = [list(row) for row in doc["grid"]]
    n = 1 + max(
        (int(tag[1:]) for row in grid for tag in row if tag.startswith("v")), default=0
    )
    plan = TilePlan(int(doc["tile_side"]), grid, n)
    for tile, hv, vv in doc.get("crossings", []):
        plan.crossing_passes[tuple(tile)] = (int(hv), int(vv))
    for u, v, t1, t2 in doc.get("edges", []):
        plan.adjacency_realization[(int(u), int(v))] = (tuple(t1), tuple(t2))
    return plan
