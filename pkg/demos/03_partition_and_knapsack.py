"""Number partitioning and knapsack as trees of constant-coupling adders."""

from qubolattice import (
    KnapsackInstance,
    PartitionInstance,
    brute_force,
    build_numpart_qubo,
    decode_partition,
    embed_numpart,
    knapsack_sweep,
    predicted_knapsack_length,
    predicted_numpart_length,
    unembed,
    validate,
)
from qubolattice.numpart import ground_energy_by_completion

print("== partition {2, 2, 3, 3} ==")
inst = PartitionInstance((2, 2, 3, 3))
tree = build_numpart_qubo(inst)
print(f"{tree.qubo.num_vars} bits, max coupling {tree.qubo.max_abs_quadratic()}")
energy, witness = ground_energy_by_completion(tree)
print(f"ground energy {energy}; decoded: {decode_partition(tree, witness)}")

print("\n== embedding the summation tree ==")
embedded = embed_numpart(inst, 4)
report = validate(
    embedded.embedding,
    embedded.logical.interaction_edges(),
    range(embedded.logical.num_vars),
)
print(f"realized side {embedded.embedding.lattice.L} "
      f"(bound {predicted_numpart_length(4, 2, 4):.0f}), valid={report.ok}")
tiny = embed_numpart(PartitionInstance((1, 1)), 4)
spec = brute_force(tiny.physical)
print(f"{{1,1}} on one cell: physical ground {spec.ground_energy}, "
      f"decodes to {[unembed(tiny, s)[0] for s in spec.ground_states]}")

print("\n== knapsack by window sweep ==")
ks = KnapsackInstance(values=(2, 3, 1, 5), weights=(1, 2, 2, 3), capacity=4)
subset, value = knapsack_sweep(ks)
print(f"optimal subset {sorted(subset)} with value {value}")
print(f"size estimate for 16 items with 3-bit values and weights: "
      f"L <= {predicted_knapsack_length(16, 3, 3, 4):.0f}")
print(f"crossover arithmetic: tree {predicted_numpart_length(16, 2, 4):.0f} "
      f"vs flat {predicted_numpart_length(16, 2, 4, 'linear'):.0f} near L~60")
