"""Hamiltonian cycles: intersecting cliques, permutation trees, vertex tiles."""

from qubolattice import (
    HamcycleInstance,
    brute_force,
    build_ic_qubo,
    build_tileable_hamcycle,
    decode_cycle,
    embed_permutation_tree,
    embed_tileable_hamcycle,
    predicted_hamcycle_length,
    predicted_permutation_length,
    validate,
)
from qubolattice.hamcycle import cycle_assignment
from qubolattice.qubo import anneal_solve

print("== the classic position-matrix objective on C_4 ==")
c4 = HamcycleInstance(((0, 1), (1, 2), (2, 3), (3, 0)))
ic = build_ic_qubo(c4)
spec = brute_force(ic.qubo, cap=16)
print(f"ground {spec.ground_energy} with {spec.state_count_at_ground} states "
      f"(4 rotations x 2 directions)")
print("one decoded cycle:", decode_cycle(spec.ground_states[0], c4)["cycle"])

print("\n== permutation constraints as threaded trees ==")
e = embed_permutation_tree(4)
print(f"N=4 layout realizes side {e.embedding.lattice.L} "
      f"(formula {predicted_permutation_length(4):.0f}); "
      f"N=16 would take {predicted_permutation_length(16):.0f} "
      f"vs {predicted_permutation_length(16, 'complete'):.0f} complete")

print("\n== the tileable vertex-block encoding on a triangle ==")
tri = HamcycleInstance(((0, 1), (1, 2), (0, 2)))
tq = build_tileable_hamcycle(tri)
state = cycle_assignment(tq, [0, 1, 2])
print(f"{tq.qubo.num_vars} bits; hand-built cycle state has energy "
      f"{tq.qubo.energy(state)}")
best, energy = anneal_solve(tq.qubo, sweeps=2500, restarts=12, seed=1)
print(f"annealer reaches energy {energy:.1f}; decodes to "
      f"{decode_cycle(best, tri)}")

embedded = embed_tileable_hamcycle(tri)
report = validate(
    embedded.embedding,
    embedded.logical.interaction_edges(),
    range(embedded.logical.num_vars),
)
print(f"stitched embedding: side {embedded.embedding.lattice.L}, valid={report.ok}")
print(f"size arithmetic at N=45, 7 tiles/side: tileable "
      f"{predicted_hamcycle_length(45, 7):.0f} vs complete "
      f"{predicted_hamcycle_length(45, 7, 'complete'):.0f}")
