"""Unary tree QUBOs, the K_{2,2} gadget, and fractal embeddings."""

import itertools
import math

import pytest

from qubolattice.embedding import unembed, validate
from qubolattice.qubo import SPIN, brute_force
from qubolattice.unary import (
    UnaryError,
    build_unary_qubo,
    fill_tree_optimize,
    fractal_embed_unary,
    k22_gadget,
    lift_one_hot,
    one_hot_ground_states,
    predicted_unary_length,
)


class TestBuildUnaryQubo:
    @pytest.mark.parametrize("N", range(2, 9))
    def test_ground_states_are_one_hot(self, N):
        ut = build_unary_qubo(N)
        spec = brute_force(ut.qubo)
        assert spec.ground_energy == 0.0
        assert spec.gap >= 1.0
        assert set(spec.ground_states) == one_hot_ground_states(ut)
        hot_leaves = set()
        for state in spec.ground_states:
            hot = [k for k in range(1, N + 1) if state[ut.leaf_index[k]] == 1]
            assert len(hot) == 1
            hot_leaves.add(hot[0])
        assert hot_leaves == set(range(1, N + 1))

    def test_padding_forced_to_zero(self):
        ut = build_unary_qubo(3)
        pad = ut.qubo.index_of("x4")
        for state in brute_force(ut.qubo).ground_states:
            assert state[pad] == 0

    def test_n2_matches_pair_constraint(self):
        ut = build_unary_qubo(2)
        spec = brute_force(ut.qubo)
        assert set(spec.ground_states) == {(1, 0), (0, 1)}

    @pytest.mark.parametrize("N", range(2, 9))
    def test_size_bounds(self, N):
        ut = build_unary_qubo(N)
        assert ut.edge_count() <= 3 * N
        assert ut.vertex_count() <= 4 * N

    def test_allow_zero_adds_empty_state(self):
        ut = build_unary_qubo(4, allow_zero=True)
        spec = brute_force(ut.qubo)
        assert spec.ground_energy == 0.0
        projections = set()
        for state in spec.ground_states:
            projections.add(tuple(state[ut.leaf_index[k]] for k in range(1, 5)))
        assert projections == {
            (0, 0, 0, 0),
            (1, 0, 0, 0),
            (0, 1, 0, 0),
            (0, 0, 1, 0),
            (0, 0, 0, 1),
        }

    def test_rejects_tiny_n(self):
        with pytest.raises(UnaryError):
            build_unary_qubo(1)


class TestK22Gadget:
    def oracle_projections(self):
        best = {}
        for z, x, y in itertools.product((-1, 1), repeat=3):
            e = (z - x - y - 1) ** 2
            best[(z, x, y)] = e
        lo = min(best.values())
        return {k for k, v in best.items() if v == lo}

    def gadget_projections(self):
        g = k22_gadget("z", "x", "y", "w")
        spec = brute_force(g)
        iz, ix, iy = g.index_of("z"), g.index_of("x"), g.index_of("y")
        return {(s[iz], s[ix], s[iy]) for s in spec.ground_states}

    def test_ground_projection_matches_oracle(self):
        assert self.gadget_projections() == self.oracle_projections()

    def test_specific_minimizer(self):
        assert (1, 1, -1) in self.gadget_projections()

    def test_couplings_on_k22_edges_only(self):
        g = k22_gadget("z", "x", "y", "w")
        names = {frozenset((g.name_of(i), g.name_of(j))) for i, j in g.quadratic}
        assert names == {
            frozenset(("z", "x")),
            frozenset(("z", "y")),
            frozenset(("w", "x")),
            frozenset(("w", "y")),
        }

    def test_distinct_spins_required(self):
        with pytest.raises(UnaryError):
            k22_gadget("a", "a", "y", "w")


class TestPredictedLength:
    def test_paper_points(self):
        assert predicted_unary_length(16, 4) == pytest.approx(3.0)
        assert predicted_unary_length(64, 4) == pytest.approx(7.0)
        assert predicted_unary_length(256, 4) == pytest.approx(15.0)

    def test_optimized_ratio_large(self):
        J, N = 64, 4_000_000
        ratio = predicted_unary_length(N, J, optimized=True) / predicted_unary_length(N, J)
        assert ratio == pytest.approx(0.78, abs=0.03)

    def test_optimized_recursion_small(self):
        # one recursion step: (L, N) = (1, 4) -> (3, 18)
        assert predicted_unary_length(18, 4, optimized=True) == pytest.approx(3.0)


class TestFractalEmbedding:
    @pytest.mark.parametrize("N,J,L", [(4, 4, 1), (16, 4, 3), (64, 4, 7), (256, 4, 15)])
    def test_realized_side_lengths(self, N, J, L):
        embedded, layout = fractal_embed_unary(N, J)
        assert layout.L == L
        assert embedded.embedding.lattice.L == L

    @pytest.mark.parametrize("N,J", [(2, 2), (8, 2), (2, 4), (3, 4), (5, 4), (8, 4), (16, 4)])
    def test_validates(self, N, J):
        embedded, _ = fractal_embed_unary(N, J)
        report = validate(
            embedded.embedding,
            embedded.logical.interaction_edges(),
            range(embedded.logical.num_vars),
        )
        assert report.ok, report.summary()

    def test_realized_matches_prediction_j2(self):
        _, layout = fractal_embed_unary(8, 2)
        assert layout.L == predicted_unary_length(8, 2)

    def test_small_case_brute_force(self):
        # N=4 on one K_{4,4} cell: 8 physical spins, fully enumerable
        embedded, layout = fractal_embed_unary(4, 4)
        assert embedded.physical.num_vars == 8
        spec = brute_force(embedded.physical)
        assert spec.ground_energy == pytest.approx(0.0, abs=1e-9)
        decoded = set()
        for s in spec.ground_states:
            logical, broken = unembed(embedded, s)
            assert broken == 0
            hot = [
                k
                for k in range(1, 5)
                if logical[embedded.logical.index_of(f"x{k}")] == 1
            ]
            assert len(hot) == 1
            decoded.add(hot[0])
        assert decoded == {1, 2, 3, 4}

    def test_n2_j2_brute_force(self):
        embedded, _ = fractal_embed_unary(2, 2)
        spec = brute_force(embedded.physical)
        assert spec.ground_energy == pytest.approx(0.0, abs=1e-9)

    def test_terms_are_individually_nonnegative_lower_bound(self):
        # every constituent term of the physical objective is nonnegative,
        # so exhibiting a zero-energy state pins the ground energy exactly
        embedded, layout = fractal_embed_unary(8, 4)
        for k in range(1, 9):
            state = lift_one_hot(embedded, layout.tree, f"x{k}")
            assert embedded.physical.energy(state) == pytest.approx(0.0, abs=1e-9)

    def test_n8_one_hot_ground_set(self):
        # gadget minima are -3 (shifted to 0), chain penalties and padding are
        # nonnegative, so 0 is a certified lower bound; anneal corroborates
        from qubolattice.qubo import anneal_solve

        embedded, layout = fractal_embed_unary(8, 4)
        best, energy = anneal_solve(embedded.physical, sweeps=1500, restarts=20, seed=3)
        assert energy >= -1e-9
        assert energy == pytest.approx(0.0, abs=1e-9)
        logical, broken = unembed(embedded, best)
        assert broken == 0
        hot = [k for k in range(1, 9) if logical[embedded.logical.index_of(f"x{k}")] == 1]
        assert len(hot) == 1

    def test_rejects_j1(self):
        from qubolattice.embedding import EmbeddingError

        with pytest.raises(EmbeddingError):
            fractal_embed_unary(4, 1)


class TestFillOptimize:
    def test_adds_three_bits_per_sixteen(self):
        _, layout = fractal_embed_unary(16, 4)
        filled = fill_tree_optimize(layout)
        assert filled.added_bits == 3
        assert filled.L == layout.L
        assert filled.N == 19

    def test_first_branch_adds_j_minus_2(self):
        _, layout = fractal_embed_unary(16, 4)
        filled = fill_tree_optimize(layout)
        # the full free cell hosts a three-leaf branch: net +2 = J - 2
        assert any("+3" in note or "branches" in note for note in filled.notes)
        first_cell_gain = 2
        assert filled.added_bits >= first_cell_gain

    def test_filled_layout_validates(self):
        _, layout = fractal_embed_unary(16, 4)
        filled = fill_tree_optimize(layout)
        emb = filled.embedded
        report = validate(
            emb.embedding, emb.logical.interaction_edges(), range(emb.logical.num_vars)
        )
        assert report.ok, report.summary()

    def test_j2_adds_nothing(self):
        _, layout = fractal_embed_unary(8, 2)
        filled = fill_tree_optimize(layout)
        assert filled.added_bits == 0
        assert filled.notes[-1].startswith("no fill possible")

    def test_filled_ground_states_still_one_hot(self):
        _, layout = fractal_embed_unary(16, 4)
        filled = fill_tree_optimize(layout)
        emb = filled.embedded
        hot_names = filled.tree.real_leaves
        assert len(hot_names) == 19
        for name in hot_names[:3] + hot_names[-3:]:
            state = lift_one_hot(emb, filled.tree, name)
            assert emb.physical.energy(state) == pytest.approx(0.0, abs=1e-9)
