"""One-hot constraints as merge trees, and their fractal lattice layouts.

The pairwise-sum tree turns an all-to-all one-hot penalty into a tree of
small constraints; each merge then fits a K_{2,2} block via a four-spin
gadget, and the whole thing packs into a lattice of side about 2 sqrt(N/J).
"""

from qubolattice import (
    brute_force,
    build_unary_qubo,
    fill_tree_optimize,
    fractal_embed_unary,
    k22_gadget,
    predicted_unary_length,
)

print("== the tree objective ==")
ut = build_unary_qubo(6)
spec = brute_force(ut.qubo)
print(f"N=6: {ut.vertex_count()} bits, {ut.edge_count()} couplings "
      f"(bounds 4N={24}, 3N={18})")
print(f"ground energy {spec.ground_energy}, {spec.state_count_at_ground} states, "
      f"gap {spec.gap}")

print("\n== the K_2,2 merge gadget ==")
gadget = k22_gadget("z", "x", "y", "w")
gspec = brute_force(gadget)
print(f"couplings: {[tuple(gadget.name_of(k) for k in key) for key in gadget.quadratic]}")
print(f"{gspec.state_count_at_ground} minima at energy {gspec.ground_energy}")

print("\n== fractal layouts: side doubles (+1) as leaves quadruple ==")
for n in (4, 16, 64, 256):
    _, layout = fractal_embed_unary(n, 4)
    print(f"N={n:>3}: realized side {layout.L:>2}, predicted "
          f"{predicted_unary_length(n, 4):.0f}, leaf cells {layout.N_star}")

print("\n== filling the unused cells ==")
_, layout = fractal_embed_unary(16, 4)
filled = fill_tree_optimize(layout)
print(f"N=16 grows to N={filled.N} at the same side {filled.L} "
      f"(+{filled.added_bits} bits); note: {filled.notes[-1]}")
print(f"large-N optimized/unoptimized ratio at J=64: "
      f"{predicted_unary_length(4_000_000, 64, optimized=True) / predicted_unary_length(4_000_000, 64):.3f}")
