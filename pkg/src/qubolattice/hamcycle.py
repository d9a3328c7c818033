"""Hamiltonian cycles three ways: the intersecting-cliques objective, its
treelike permutation-constraint embedding, and a tileable per-vertex encoding.

The tileable form gives every vertex a block of bits: a position one-hot
x_{v,j}, one successor-selector bit per incident edge, per-position selector
bits, and a three-bit product gadget tying a selector to "v sits at j and u
at j+1".  Only neighboring blocks interact, so the whole thing stitches onto
a tile plan of the input graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ._layout import SlotPlanner
from .embedding import (
    EmbeddedQubo,
    EmbeddingError,
    MinorEmbedding,
    choose_alpha,
    embed_complete_chimera,
    embed_qubo,
)
from .qubo import BINARY, SPIN, Qubo, QuboBuilder
from .tiling import TilePlan, TilingError, route_graph_to_tiles
from .unary import _add_bit_constraint, _add_gadget


class HamcycleError(ValueError):
    """Invalid instance or unsupported size."""


@dataclass(frozen=True)
class HamcycleInstance:
    edges: tuple[tuple[int, int], ...]
    num_vertices: int | None = None

    def __post_init__(self):
        for u, v in self.edges:
            if u == v:
                raise HamcycleError("self loops not allowed")

    @property
    def n(self) -> int:
        if self.num_vertices is not None:
            return self.num_vertices
        return 1 + max((max(e) for e in self.edges), default=0)

    def neighbors(self, v: int) -> list[int]:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return sorted(out)


# ---------------------------------------------------------------------------
# intersecting cliques


@dataclass
class ICQubo:
    """Position-matrix objective; position indices wrap modulo N."""

    qubo: Qubo
    n: int
    roles: dict[str, int]


def build_ic_qubo(inst: HamcycleInstance) -> ICQubo:
    """Permutation one-hots plus penalties on non-edges between consecutive
    positions; ordered non-adjacent pairs each contribute once."""
    n = inst.n
    if n < 3:
        raise HamcycleError("a cycle needs at least three vertices")
    builder = QuboBuilder(BINARY)
    for v in range(n):
        for j in range(n):
            builder.var(f"x:{v}:{j}")
    for v in range(n):
        builder.add_squared_affine(1.0, [(f"x:{v}:{j}", -1.0) for j in range(n)])
    for j in range(n):
        builder.add_squared_affine(1.0, [(f"x:{v}:{j}", -1.0) for v in range(n)])
    edge_set = {frozenset(e) for e in inst.edges}
    for u in range(n):
        for v in range(n):
            if u == v or frozenset((u, v)) in edge_set:
                continue
            for j in range(n):
                builder.add_quadratic(f"x:{u}:{j}", f"x:{v}:{(j + 1) % n}", 1.0)
    q = builder.build()
    roles = {q.name_of(i): i for i in range(q.num_vars)}
    return ICQubo(q, n, roles)


def decode_cycle(solution, inst: HamcycleInstance, roles: dict[str, int] | None = None) -> dict:
    """Read the position matrix; verify bijectivity and edge existence.

    Failures are results with a named first violation, not exceptions.  With
    no role map, positions are assumed at indices v * n + j (the compilers'
    natural variable order).
    """
    n = inst.n
    if roles is None:
        roles = {f"x:{v}:{j}": v * n + j for v in range(n) for j in range(n)}
    position_of: dict[int, int] = {}
    for v in range(n):
        hot = [j for j in range(n) if solution[roles[f"x:{v}:{j}"]] == 1]
        if len(hot) != 1:
            return {"ok": False, "reason": f"vertex {v} has {len(hot)} positions"}
        position_of[v] = hot[0]
    if len(set(position_of.values())) != n:
        return {"ok": False, "reason": "positions are not a bijection"}
    order: list[int] = [0] * n
    for v, j in position_of.items():
        order[j] = v
    edge_set = {frozenset(e) for e in inst.edges}
    for j in range(n):
        u, v = order[j], order[(j + 1) % n]
        if frozenset((u, v)) not in edge_set:
            return {"ok": False, "reason": f"missing edge ({u}, {v})"}
    return {"ok": True, "cycle": order}


# ---------------------------------------------------------------------------
# treelike permutation embedding


def predicted_permutation_length(N: int, strategy: str = "tree") -> float:
    """Side-length estimates for the permutation constraint on N objects."""
    if strategy == "tree":
        return N / 2.0 * (2.0 * math.sqrt(N) - 1.0)
    if strategy == "complete":
        return N * N / 4.0
    raise HamcycleError(f"unknown strategy {strategy!r}")


def build_permutation_qubo(n: int) -> Qubo:
    """Spin objective whose zero-energy states are the n x n permutations.

    Row one-hots stay pairwise (they live inside one clique cell); column
    one-hots split through merge gadgets so all couplings fit cell edges.
    """
    if n not in (2, 4):
        raise HamcycleError(
            "constructed permutation trees cover N in {2, 4}; predicted tree "
            f"side for N={n} is {predicted_permutation_length(n):.0f}"
        )
    b = QuboBuilder(SPIN)
    for v in range(n):
        for j in range(n):
            b.var(f"x:{v}:{j}")
    for v in range(n):
        _add_bit_constraint(b, 1.0, [(f"x:{v}:{j}", -1.0) for j in range(n)])
    if n == 2:
        for j in range(n):
            _add_bit_constraint(b, 1.0, [(f"x:{v}:{j}", -1.0) for v in range(n)])
        return b.build()
    for j in range(n):
        _add_gadget(b, f"zl:{j}", f"x:0:{j}", f"x:1:{j}", f"wl:{j}")
        _add_gadget(b, f"zr:{j}", f"x:2:{j}", f"x:3:{j}", f"wr:{j}")
        _add_bit_constraint(b, 1.0, [(f"zl:{j}", -1.0), (f"zr:{j}", -1.0)])
    return b.build()


def embed_permutation_tree(
    N: int, J: int = 4, lattice_side: int | None = None
) -> EmbeddedQubo:
    """Thread N per-position merge trees through the lattice.

    Constructed for N = 4 (and the trivial N = 2): the four vertex blocks
    occupy the lattice corners, position values descend into mid-edge merge
    cells, and the per-position root links join in the center, realizing the
    (N/2)(2 sqrt(N) - 1) = 6 side length.
    """
    if J != 4:
        raise HamcycleError("the constructed permutation layout uses K_{4,4} cells")
    required = 1 if N == 2 else 6
    if lattice_side is not None and lattice_side < required:
        raise HamcycleError(
            f"lattice side {lattice_side} too small; the layout needs L={required}"
        )
    logical = build_permutation_qubo(N)
    if N == 2:
        emb4 = embed_complete_chimera(4, 4)
        emb = MinorEmbedding(emb4.lattice, dict(emb4.chains), choose_alpha(logical))
        return embed_qubo(logical, emb)
    planner = SlotPlanner(4)
    _permutation_layout_4(planner)
    emb = planner.to_embedding(logical, choose_alpha(logical), L=lattice_side or 6)
    return embed_qubo(logical, emb)


def _permutation_layout_4(p: SlotPlanner) -> None:
    # corner cliques: x:{v}:{j} occupies s_j plus r_{sigma(j)} of its cell
    corners = {0: (0, 0), 1: (0, 5), 2: (5, 0), 3: (5, 5)}
    sigma = {0: (0, 1, 2, 3), 1: (2, 3, 0, 1), 2: (0, 1, 2, 3), 3: (2, 3, 0, 1)}
    inner_col = {0: 1, 5: 4}
    merge_row = {0: 2, 1: 3, 2: 2, 3: 3}
    for v, (ci, cj) in corners.items():
        for j in range(4):
            p.claim((ci, cj), "s", j, f"x:{v}:{j}")
            p.claim((ci, cj), "r", sigma[v][j], f"x:{v}:{j}")
        step = -1 if cj == 5 else 1
        for j in range(4):
            track = sigma[v][j]
            col = ci if j < 2 else inner_col[ci]
            if j >= 2:
                # hop through the inner column of the corner tile
                p.claim((col, cj), "s", j, f"x:{v}:{j}")
                p.claim((col, cj), "r", track, f"x:{v}:{j}")
            p.run_vertical(f"x:{v}:{j}", track, col, cj + step, merge_row[j])
    # merge cells: (z, w) side assignments keep the rightward runs disjoint
    left_merges = {0: ((0, 2), 0, 1), 1: ((0, 3), 0, 1), 2: ((1, 2), 1, 2), 3: ((1, 3), 1, 2)}
    right_merges = {0: ((5, 2), 2, 3), 1: ((5, 3), 2, 3), 2: ((4, 2), 3, 0), 3: ((4, 3), 3, 0)}
    for j, (cell, s_z, s_w) in left_merges.items():
        p.claim(cell, "s", s_z, f"zl:{j}")
        p.claim(cell, "s", s_w, f"wl:{j}")
        p.run_horizontal(f"zl:{j}", s_z, cell[1], cell[0] + 1, 2 if j in (0, 1) else 3)
    for j, (cell, s_z, s_w) in right_merges.items():
        p.claim(cell, "s", s_z, f"zr:{j}")
        p.claim(cell, "s", s_w, f"wr:{j}")
        p.run_horizontal(f"zr:{j}", s_z, cell[1], cell[0] - 1, 2 if j in (0, 1) else 3)
    # root-link hops: one intra-cell edge realizes each (1 - zl - zr)^2 pair
    p.claim((2, 2), "r", 0, "zl:0")
    p.claim((2, 3), "r", 0, "zl:1")
    p.claim((3, 2), "r", 1, "zl:2")
    p.claim((3, 3), "r", 1, "zl:3")


def lift_permutation(e: EmbeddedQubo, perm: tuple[int, ...]) -> tuple[int, ...]:
    """Chain-aligned physical state for x[v][j] = 1 iff perm[v] == j."""
    logical = e.logical
    n = int(math.isqrt(len(perm) ** 2))
    n = len(perm)
    bits: dict[str, int] = {}
    for v in range(n):
        for j in range(n):
            bits[f"x:{v}:{j}"] = 1 if perm[v] == j else 0
    for j in range(n):
        bits[f"zl:{j}"] = bits[f"x:0:{j}"] + bits[f"x:1:{j}"]
        bits[f"zr:{j}"] = bits[f"x:2:{j}"] + bits[f"x:3:{j}"]
    assignment = []
    for idx in range(logical.num_vars):
        name = logical.name_of(idx)
        if name.startswith("w"):
            j = int(name.split(":")[1])
            a, bnm = (f"x:0:{j}", f"x:1:{j}") if name.startswith("wl") else (
                f"x:2:{j}", f"x:3:{j}")
            sx, sy = 2 * bits[a] - 1, 2 * bits[bnm] - 1
            assignment.append(-1 if sx >= sy else 1)
        else:
            assignment.append(2 * bits[name] - 1)
    return e.lift(assignment)


# ---------------------------------------------------------------------------
# tileable hamcycle objective


@dataclass
class TileHamcycleQubo:
    """Per-vertex block objective whose zero-energy states are cycles."""

    qubo: Qubo
    instance: HamcycleInstance
    roles: dict[str, int] = field(default_factory=dict)
    plan: TilePlan | None = None


def and_gadget_terms(builder: QuboBuilder, z: str, x: str, y: str) -> None:
    """Quadratic penalty vanishing exactly at z = x * y.

    (1/2)[4z + 2xy - 3z(x + y)]: mismatches cost 1 at (z, x, y) = (0, 1, 1),
    1/2 at (1, 1, 0) and (1, 0, 1), and 2 at (1, 0, 0).
    """
    builder.add_linear(z, 2.0)
    builder.add_quadratic(x, y, 1.0)
    builder.add_quadratic(z, x, -1.5)
    builder.add_quadratic(z, y, -1.5)


def build_tileable_hamcycle(inst: HamcycleInstance) -> TileHamcycleQubo:
    """Vertex-local encoding with successor selectors.

    Per vertex v: a position one-hot over x_{v,j}; one selector z_{v,u} per
    incident edge, their one-hot enforced directly (degree <= 2) or through a
    caterpillar of pairwise-sum ancillas; per-position selectors z_{v,u,j}
    consistent with z_{v,u}; and the product gadget z_{v,u,j} = x_{v,j} *
    x_{u,j+1}.  Zero-energy states exist exactly for Hamiltonian cycles.
    """
    n = inst.n
    if n < 3:
        raise HamcycleError("a cycle needs at least three vertices")
    builder = QuboBuilder(BINARY)
    for v in range(n):
        for j in range(n):
            builder.var(f"x:{v}:{j}")
    for v in range(n):
        builder.add_squared_affine(1.0, [(f"x:{v}:{j}", -1.0) for j in range(n)])
        nbrs = inst.neighbors(v)
        if not nbrs:
            raise HamcycleError(f"vertex {v} is isolated; no cycle exists")
        selectors = [f"z:{v}:{u}" for u in nbrs]
        if len(selectors) <= 2:
            builder.add_squared_affine(1.0, [(s, -1.0) for s in selectors])
        else:
            prev = selectors[0]
            for i, sel in enumerate(selectors[1:-1], start=1):
                acc = f"acc:{v}:{i}"
                builder.add_squared_affine(0.0, [(acc, 1.0), (prev, -1.0), (sel, -1.0)])
                prev = acc
            builder.add_squared_affine(1.0, [(prev, -1.0), (selectors[-1], -1.0)])
        for u in nbrs:
            builder.add_squared_affine(
                0.0,
                [(f"z:{v}:{u}", 1.0)] + [(f"z:{v}:{u}:{j}", -1.0) for j in range(n)],
            )
            for j in range(n):
                and_gadget_terms(
                    builder, f"z:{v}:{u}:{j}", f"x:{v}:{j}", f"x:{u}:{(j + 1) % n}"
                )
    q = builder.build()
    roles = {q.name_of(i): i for i in range(q.num_vars)}
    return TileHamcycleQubo(q, inst, roles)


def cycle_assignment(tq: TileHamcycleQubo, order: list[int]) -> tuple[int, ...]:
    """The intended zero-energy state for a vertex order around the cycle."""
    inst = tq.instance
    n = inst.n
    position = {v: j for j, v in enumerate(order)}
    values: dict[str, int] = {}
    for v in range(n):
        for j in range(n):
            values[f"x:{v}:{j}"] = 1 if position[v] == j else 0
    for v in range(n):
        succ = order[(position[v] + 1) % n]
        nbrs = inst.neighbors(v)
        for u in nbrs:
            values[f"z:{v}:{u}"] = 1 if u == succ else 0
            for j in range(n):
                values[f"z:{v}:{u}:{j}"] = (
                    values[f"x:{v}:{j}"] * values[f"x:{u}:{(j + 1) % n}"]
                )
        selectors = [f"z:{v}:{u}" for u in nbrs]
        running = values[selectors[0]]
        for i in range(1, len(selectors) - 1):
            running += values[selectors[i]]
            values[f"acc:{v}:{i}"] = running
    return tuple(values[tq.qubo.name_of(i)] for i in range(tq.qubo.num_vars))


# ---------------------------------------------------------------------------
# tileable embedding


def predicted_hamcycle_length(N: int, L_G: int, strategy: str = "tileable") -> float:
    """Side bounds: tileable per-vertex blocks vs one complete embedding."""
    if strategy == "tileable":
        return L_G / 2.0 * (3.0 * N + 5.0)
    if strategy == "complete":
        return N * N / 4.0
    raise HamcycleError(f"unknown strategy {strategy!r}")


def _double_plan(plan: TilePlan) -> TilePlan:
    grid = []
    for row in plan.grid:
        doubled = [tag for tag in row for _ in (0, 1)]
        grid.append(doubled)
        grid.append(list(doubled))
    out = TilePlan(plan.tile_side, grid, plan.num_vertices)
    for (r, c), passes in plan.crossing_passes.items():
        for dr in (0, 1):
            for dc in (0, 1):
                out.crossing_passes[(2 * r + dr, 2 * c + dc)] = passes
    return out


def _assign_edge_tiles(plan: TilePlan, edges):
    """One adjacent tile pair per edge, every tile hosting at most one edge."""
    busy: set[tuple[int, int]] = set()
    chosen: dict[tuple[int, int], tuple[tuple[int, int], tuple[int, int]]] = {}
    for u, v in sorted({tuple(sorted(e)) for e in edges}):
        tu, tv = plan.vertex_tiles(u), plan.vertex_tiles(v)
        candidates = set()
        for (r, c) in tu:
            for nxt in ((r, c + 1), (r + 1, c), (r, c - 1), (r - 1, c)):
                if nxt in tv:
                    candidates.add(tuple(sorted(((r, c), nxt))))
        for pair in sorted(candidates):
            if pair[0] not in busy and pair[1] not in busy:
                chosen[(u, v)] = pair
                busy.update(pair)
                break
        else:
            raise TilingError(f"no free tile pair for edge ({u}, {v})")
    return chosen


def embed_tileable_hamcycle(inst: HamcycleInstance, J: int = 4) -> EmbeddedQubo:
    """Stitch the per-vertex blocks onto a doubled tile plan.

    Tiles use 3N + 3 clique slots (positions, neighbor copies, per-position
    selectors, selector plus two accumulator slots) and alternate slot phases
    checkerboard-style, so chains and neighbor copies cross tile boundaries
    on aligned tracks.  Realized side length stays within (L_G/2)(3N + 5)
    with L_G taken from the router.
    """
    if J != 4:
        raise HamcycleError("the tileable layout is constructed for K_{4,4} cells")
    n = inst.n
    tq = build_tileable_hamcycle(inst)
    base_plan = route_graph_to_tiles(inst.edges, num_vertices=n)
    tq.plan = base_plan
    plan = _double_plan(base_plan)
    edge_tiles = _assign_edge_tiles(plan, inst.edges)
    q_slots = 3 * n + 3
    ell = -(-q_slots // 4)
    planner = SlotPlanner(4)

    def phase(tile):
        return (tile[0] + tile[1]) % 2

    def origin(tile):
        r, c = tile
        return c * ell, r * ell

    def slot_x(tile, j):
        return phase(tile) * n + j

    def full_arms(tile, slot, name):
        oi, oj = origin(tile)
        row, track = divmod(slot, 4)
        planner.run_horizontal(name, track, oj + row, oi, oi + ell - 1)
        planner.run_vertical(name, track, oi + row, oj, oj + ell - 1)

    regions = {v: sorted(plan.vertex_tiles(v)) for v in range(n)}
    partner_of: dict[tuple[int, int], tuple[tuple[int, int], int, int]] = {}
    for (u, v), (t1, t2) in edge_tiles.items():
        for mine, theirs in ((t1, t2), (t2, t1)):
            owner = u if plan.role(*mine) == f"v{u}" else v
            other = v if owner == u else u
            partner_of[mine] = (theirs, owner, other)

    for v in range(n):
        for tile in regions[v]:
            for j in range(n):
                full_arms(tile, slot_x(tile, j), f"x:{v}:{j}")
    # crossings conduct one vertex horizontally (s arms) and one vertically
    # (r arms); a whole run of consecutive crossings carries the entry-side
    # phase, and the exit tile bridges if its own phase differs
    seen_runs: set[tuple[int, int, str]] = set()
    for tile in sorted(plan.crossing_passes):
        for axis in ("h", "v"):
            if (tile[0], tile[1], axis) in seen_runs:
                continue
            dr, dc = (0, 1) if axis == "h" else (1, 0)
            r, c = tile
            while plan.role(r - dr, c - dc) == "x":
                r, c = r - dr, c - dc
            run = []
            rr, cc = r, c
            while plan.role(rr, cc) == "x":
                run.append((rr, cc))
                seen_runs.add((rr, cc, axis))
                rr, cc = rr + dr, cc + dc
            enter, exit_tile = (r - dr, c - dc), (rr, cc)
            passer = plan.crossing_passes[run[0]][0 if axis == "h" else 1]
            ph = phase(enter)
            for cross in run:
                oi, oj = origin(cross)
                for j in range(n):
                    row, track = divmod(ph * n + j, 4)
                    if axis == "h":
                        planner.run_horizontal(
                            f"x:{passer}:{j}", track, oj + row, oi, oi + ell - 1
                        )
                    else:
                        planner.run_vertical(
                            f"x:{passer}:{j}", track, oi + row, oj, oj + ell - 1
                        )
            if phase(exit_tile) != ph:
                for j in range(n):
                    _claim_bridge(
                        planner, origin, ell, exit_tile, run[-1],
                        ph * n + j, slot_x(exit_tile, j), f"x:{passer}:{j}",
                    )

    tree_edges = _region_trees(plan, regions, partner_of)

    for v in range(n):
        for (t1, t2) in tree_edges[v]:
            # the bridge segment lives on IO arms parallel to the hop; host it
            # in an endpoint whose partner (copy traffic) runs the other axis
            hop_horizontal = t1[0] == t2[0]
            t_from, t_to = t1, t2
            partner = partner_of.get(t1)
            if partner is not None and (partner[0][0] == t1[0]) == hop_horizontal:
                t_from, t_to = t2, t1
                partner2 = partner_of.get(t2)
                if partner2 is not None and (partner2[0][0] == t2[0]) == hop_horizontal:
                    raise EmbeddingError(
                        f"no safe side for a chain bridge between {t1} and {t2}"
                    )
            for j in range(n):
                _claim_bridge(
                    planner, origin, ell, t_from, t_to,
                    slot_x(t_to, j), slot_x(t_from, j), f"x:{v}:{j}",
                )

    for (u, v), pair in sorted(edge_tiles.items()):
        for mine in pair:
            theirs, owner, other = partner_of[mine]
            for j in range(n):
                full_arms(mine, 2 * n + j, f"z:{owner}:{other}:{j}")
            full_arms(mine, 3 * n, f"z:{owner}:{other}")
            for j in range(n):
                links = [
                    (2 * n + (j - 1) % n) // 4,
                    slot_x(mine, (j - 1) % n) // 4,
                ]
                _claim_copy(
                    planner, origin, ell, mine, theirs,
                    (1 - phase(mine)) * n + j, f"x:{other}:{j}", links,
                )

    for v in range(n):
        _wire_selector_chain(
            planner, origin, ell, inst, v, n, regions[v], tree_edges[v],
            edge_tiles, plan,
        )

    emb = planner.to_embedding(tq.qubo, choose_alpha(tq.qubo), L=ell * plan.grid_side)
    return embed_qubo(tq.qubo, emb)


def _region_trees(plan, regions, partner_of):
    """Spanning tree per region; crossing runs connect tiles without bridges.

    Returns the direct-adjacency hops that need phase bridges.  Hops through
    crossing tiles are already track-aligned by the pass-through claims.
    """
    out = {}
    for v, tiles_list in regions.items():
        tiles = set(tiles_list)

        def through(cur, dr, dc):
            nxt = (cur[0] + dr, cur[1] + dc)
            hops = 0
            while nxt in plan.crossing_passes:
                hv, vv = plan.crossing_passes[nxt]
                if (dr == 0 and hv != v) or (dc == 0 and vv != v):
                    return None
                nxt = (nxt[0] + dr, nxt[1] + dc)
                hops += 1
            if nxt in tiles:
                return nxt, hops
            return None

        candidates = []
        for cur in sorted(tiles):
            for dr, dc in ((1, 0), (0, 1)):
                res = through(cur, dr, dc)
                if res is None:
                    continue
                nxt, hops = res
                horizontal_hop = dr == 0
                bad = 0
                for t in (cur, nxt):
                    partner = partner_of.get(t)
                    if partner is not None:
                        partner_horizontal = partner[0][0] == t[0]
                        if partner_horizontal == horizontal_hop:
                            bad += 1
                candidates.append((bad, cur, nxt, hops))
        # minimum-badness spanning tree keeps bridges off copy-laden axes
        parent = {t: t for t in tiles}

        def find(t):
            while parent[t] != t:
                parent[t] = parent[parent[t]]
                t = parent[t]
            return t

        edges_v = []
        for bad, cur, nxt, hops in sorted(candidates):
            ra, rb = find(cur), find(nxt)
            if ra == rb:
                continue
            parent[ra] = rb
            if hops == 0:
                edges_v.append((cur, nxt))
        if len({find(t) for t in tiles}) != 1:
            raise EmbeddingError(f"vertex {v} region not connected in the plan")
        out[v] = edges_v
    return out


def _claim_bridge(planner, origin, ell, t_from, t_to, slot_io, slot_own, name):
    """Carry a chain across a region boundary on the neighbor-aligned slot.

    Inside t_from the chain claims a segment of the t_to-phase arm from its
    own perpendicular arm out to the shared boundary; t_to's side is the
    chain's regular full arm.
    """
    oi, oj = origin(t_from)
    row, track = divmod(slot_io, 4)
    own_rc = slot_own // 4
    if t_to[1] != t_from[1]:
        if t_to[1] > t_from[1]:
            planner.run_horizontal(name, track, oj + row, oi + own_rc, oi + ell - 1)
        else:
            planner.run_horizontal(name, track, oj + row, oi, oi + own_rc)
    else:
        if t_to[0] > t_from[0]:
            planner.run_vertical(name, track, oi + row, oj + own_rc, oj + ell - 1)
        else:
            planner.run_vertical(name, track, oi + row, oj, oj + own_rc)


def _claim_copy(planner, origin, ell, mine, theirs, slot, name, links):
    """Claim an incoming neighbor copy's arm segment inside an edge tile.

    The copy enters from the partner boundary and must reach far enough to
    cross its coupling partners' perpendicular arms.
    """
    oi, oj = origin(mine)
    row, track = divmod(slot, 4)
    if theirs[1] != mine[1]:
        if theirs[1] > mine[1]:
            planner.run_horizontal(name, track, oj + row, oi + min(links), oi + ell - 1)
        else:
            planner.run_horizontal(name, track, oj + row, oi, oi + max(links))
    else:
        if theirs[0] > mine[0]:
            planner.run_vertical(name, track, oi + row, oj + min(links), oj + ell - 1)
        else:
            planner.run_vertical(name, track, oi + row, oj, oj + max(links))


def _wire_selector_chain(planner, origin, ell, inst, v, n, region, tree, edge_tiles, plan):
    """Route selector (and accumulator) chains between a vertex's edge tiles.

    Chains travel on free aux-slot arms along the region spanning tree and
    finish with an entry segment inside the destination tile, where the
    caterpillar couplings land on perpendicular arms.
    """
    nbrs = inst.neighbors(v)
    if len(nbrs) <= 1:
        return
    tiles = set(region) | {
        t for t, (hv, vv) in plan.crossing_passes.items() if v in (hv, vv)
    }

    def bfs(a, b, avoid, order):
        prev = {a: None}
        queue = [a]
        while queue:
            cur = queue.pop(0)
            if cur == b:
                path = [b]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            for dr, dc in order:
                nxt = (cur[0] + dr, cur[1] + dc)
                if nxt in tiles and nxt not in prev and (nxt == b or nxt not in avoid):
                    prev[nxt] = cur
                    queue.append(nxt)
        return None

    def dfs(a, b, avoid, order):
        stack = [(a, [a])]
        visited = {a}
        while stack:
            cur, path = stack.pop()
            if cur == b:
                return path
            for dr, dc in reversed(order):
                nxt = (cur[0] + dr, cur[1] + dc)
                if nxt in tiles and nxt not in visited and (nxt == b or nxt not in avoid):
                    visited.add(nxt)
                    stack.append((nxt, path + [nxt]))
        return None

    def route_variants(a, b, avoid):
        # hop and entry segments are shortest when a route leaves or enters a
        # host on its east/south side (the aux band sits in the last cell
        # line), so try several orientations and both search styles
        orders = [
            ((0, 1), (1, 0), (0, -1), (-1, 0)),
            ((1, 0), (0, 1), (-1, 0), (0, -1)),
            ((0, -1), (-1, 0), (0, 1), (1, 0)),
            ((-1, 0), (0, -1), (1, 0), (0, 1)),
        ]
        seen = []
        for search in (bfs, dfs):
            for order in orders:
                path = search(a, b, avoid, order)
                if path is not None and path not in seen:
                    seen.append(path)
                back = search(b, a, avoid, order)
                if back is not None and back[::-1] not in seen:
                    seen.append(back[::-1])
        if not seen:
            raise EmbeddingError(
                f"no selector route between {a} and {b} for vertex {v}"
            )
        return seen

    def host_of(u):
        pair = edge_tiles[tuple(sorted((v, u)))]
        return pair[0] if plan.role(*pair[0]) == f"v{v}" else pair[1]

    chain_order = [f"z:{v}:{u}" for u in nbrs]
    hosts = [host_of(u) for u in nbrs]
    prev_name, prev_host, prev_slot = chain_order[0], hosts[0], 3 * n
    for i in range(1, len(nbrs)):
        target_host = hosts[i]
        acc = acc_slot = None
        if i < len(nbrs) - 1:
            acc = f"acc:{v}:{i}"
            acc_slot = 3 * n + 1 + (i % 2)
            _claim_full_aux(planner, origin, ell, target_host, acc_slot, acc)
        routes = route_variants(
            prev_host, target_host, set(hosts) - {prev_host, target_host}
        )
        last_err: Exception | None = None
        for route in routes:
            snap = planner.snapshot()
            try:
                _route_chain(planner, origin, ell, route, prev_name, prev_slot, n)
                break
            except EmbeddingError as err:
                last_err = err
                planner.restore(snap)
        else:
            raise EmbeddingError(f"selector routing failed for vertex {v}: {last_err}")
        if acc is not None:
            prev_name, prev_host, prev_slot = acc, target_host, acc_slot


def _claim_full_aux(planner, origin, ell, tile, slot, name):
    oi, oj = origin(tile)
    row, track = divmod(slot, 4)
    planner.run_horizontal(name, track, oj + row, oi, oi + ell - 1)
    planner.run_vertical(name, track, oi + row, oj, oj + ell - 1)


def _route_chain(planner, origin, ell, route, name, own_slot, n):
    """Carry an aux chain along a tile route to a destination host.

    The chain hops off its own arms in route[0], takes full arms through the
    interior tiles, and finishes with an entry segment that crosses the
    destination's selector and accumulator arms.  Routing slots are tried
    with rollback until one fits.
    """
    ell4 = 4 * -(-(3 * n + 3) // 4)
    spare = list(range(3 * n + 3, ell4))  # slots left over by the ceiling
    last_err: Exception | None = None
    for slot in spare + [3 * n + 1, 3 * n + 2, 3 * n]:
        if slot == own_slot:
            continue
        snap = planner.snapshot()
        try:
            _claim_hop(planner, origin, ell, route[0], route[1], slot, own_slot, name)
            for tile in route[1:-1]:
                _claim_full_aux(planner, origin, ell, tile, slot, name)
            _claim_entry(planner, origin, ell, route[-2], route[-1], slot, name, n)
            return
        except EmbeddingError as err:
            last_err = err
            planner.restore(snap)
    raise EmbeddingError(f"no free aux slot for a selector chain route: {last_err}")


def _claim_hop(planner, origin, ell, tile, toward, slot, own_slot, name):
    oi, oj = origin(tile)
    row, track = divmod(slot, 4)
    own_rc = own_slot // 4
    if toward[1] != tile[1]:
        if toward[1] > tile[1]:
            planner.run_horizontal(name, track, oj + row, oi + own_rc, oi + ell - 1)
        else:
            planner.run_horizontal(name, track, oj + row, oi, oi + own_rc)
    else:
        if toward[0] > tile[0]:
            planner.run_vertical(name, track, oi + row, oj + own_rc, oj + ell - 1)
        else:
            planner.run_vertical(name, track, oi + row, oj, oj + own_rc)


def _claim_entry(planner, origin, ell, last, dest, slot, name, n):
    oi, oj = origin(dest)
    row, track = divmod(slot, 4)
    # the couplings land where this segment crosses the selector and
    # accumulator perpendicular arms, so it must span all their lines
    lo_need = (3 * n) // 4
    hi_need = min((3 * n + 2) // 4, ell - 1)
    if dest[1] != last[1]:
        if dest[1] > last[1]:
            planner.run_horizontal(name, track, oj + row, oi, oi + hi_need)
        else:
            planner.run_horizontal(name, track, oj + row, oi + lo_need, oi + ell - 1)
    else:
        if dest[0] > last[0]:
            planner.run_vertical(name, track, oi + row, oj, oj + hi_need)
        else:
            planner.run_vertical(name, track, oi + row, oj + lo_need, oj + ell - 1)
