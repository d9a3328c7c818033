"""Tileable embeddings and gap-optimal graph coloring."""

import itertools

from qubolattice import (
    ColoringInstance,
    build_tileset,
    compile_coloring,
    grid_search_coefficients,
    route_graph_to_tiles,
    verify_gap,
)
from qubolattice.coloring import count_states_at_coloring_level, _build_tileset_any

print("== routing K_5 onto tiles ==")
plan = route_graph_to_tiles(list(itertools.combinations(range(5), 2)))
for row in plan.grid:
    print("  " + " ".join(f"{t:>2}" for t in row))
print(f"{plan.rows}x{plan.cols} plan with {len(plan.crossings())} crossing tile(s)")

print("\n== assembled classical gaps ==")
tiles4 = build_tileset(4)
print(f"q=4 single tile gap:   {verify_gap(tiles4, '1-tile').gap}")
print(f"q=4 two-tile edge gap: {verify_gap(tiles4, '2-tile-hor').gap}")
print(f"q=4 chain gap:         {verify_gap(tiles4, 'chain').gap}")
tiles8 = build_tileset(8)
print(f"q=8 chain-intact gap:  {verify_gap(tiles8, '2-tile-hor').gap:.6f}")

print("\n== compiled instances count their colorings ==")
for edges, q in [((), 4), (((0, 1), (1, 2), (0, 2)), 3), (((0, 1),), 1)]:
    n = 1 + max((max(e) for e in edges), default=0)
    inst = ColoringInstance(edges, q, num_vertices=n)
    tileset = _build_tileset_any(q)
    e = compile_coloring(inst, tileset)
    count = count_states_at_coloring_level(inst, e, tileset)
    print(f"edges={list(edges)} q={q}: {count} states at the coloring level")

print("\n== rediscovering the coefficients by grid search ==")
table, gap = grid_search_coefficients("le4", resolution=5)
print(f"best q<=4 table {table} with worst-assembly gap {gap}")
table, gap = grid_search_coefficients("gt4", resolution=5)
print(f"best q>4 budget point {table} with gap {gap:.6f}")
