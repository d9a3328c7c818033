"""Coloring tiles, assembled gaps, compilers, and the coefficient search."""

import itertools
import math

import pytest

from oracles import all_graphs, proper_coloring_count
from qubolattice.coloring import (
    ColoringError,
    ColoringInstance,
    build_tileset,
    coloring_feasible_energy,
    compile_coloring,
    count_ground_colorings,
    grid_search_coefficients,
    h_diag,
    h_off,
    verify_gap,
)
from qubolattice.embedding import validate
from qubolattice.qubo import brute_force


class TestHdiagHoff:
    def test_h_diag_spectrum(self):
        frag = h_diag([f"s{i}" for i in range(4)], [f"r{i}" for i in range(4)])
        spec = brute_force(frag)
        assert spec.state_count_at_ground == 4
        assert spec.gap == pytest.approx(4.0)
        for state in spec.ground_states:
            s, r = state[:4], state[4:]
            assert s == r
            assert sum(s) == -2  # exactly one matched pair up

    def test_h_off_minimum_all_down(self):
        frag = h_off([f"s{i}" for i in range(4)], [f"r{i}" for i in range(4)])
        spec = brute_force(frag)
        assert (-1,) * 8 in spec.ground_states
        down = frag.energy((-1,) * 8)
        assert down == pytest.approx(-8.0 + 8.0 * 0 - 0)  # (0)(0)/2 - 8 + 8
        # one up spin in each half costs 2 relative to all-down
        one_each = frag.energy((1, -1, -1, -1, 1, -1, -1, -1))
        assert one_each - down == pytest.approx(2.0)

    def test_h_off_matches_sum_form(self):
        frag = h_off([f"s{i}" for i in range(4)], [f"r{i}" for i in range(4)])
        for code in range(256):
            spins = tuple(2 * ((code >> k) & 1) - 1 for k in range(8))
            s_sum, r_sum = sum(spins[:4]), sum(spins[4:])
            expected = (s_sum + 4) * (r_sum + 4) / 2.0 - 8.0
            assert frag.energy(spins) == pytest.approx(expected)


class TestVerifyGap:
    def test_q4_single_tile_gap_two(self):
        tileset = build_tileset(4)
        spec = verify_gap(tileset, "1-tile")
        assert spec.gap == pytest.approx(2.0, abs=1e-9)
        assert spec.state_count_at_ground == 4

    def test_q4_two_tile_gap_two(self):
        tileset = build_tileset(4)
        for assembly in ("2-tile-hor", "2-tile-vert"):
            spec = verify_gap(tileset, assembly)
            assert spec.gap == pytest.approx(2.0, abs=1e-9)
            assert spec.state_count_at_ground == 12  # ordered proper pairs

    def test_q4_chain_gap_two(self):
        tileset = build_tileset(4)
        spec = verify_gap(tileset, "chain")
        assert spec.gap == pytest.approx(2.0, abs=1e-9)
        assert spec.state_count_at_ground == 4

    def test_q3_clamped_slot_keeps_gap(self):
        tileset = build_tileset(3)
        spec = verify_gap(tileset, "2-tile-hor")
        assert spec.gap == pytest.approx(2.0, abs=1e-9)
        assert spec.state_count_at_ground == 6

    def test_q8_chain_intact_gap(self):
        tileset = build_tileset(8)
        spec = verify_gap(tileset, "2-tile-hor")
        assert spec.gap == pytest.approx(4.0 / 3.0, abs=1e-9)
        spec1 = verify_gap(tileset, "1-tile")
        assert spec1.gap == pytest.approx(4.0 / 3.0, abs=1e-9)
        assert spec1.state_count_at_ground == 8

    def test_q8_tile_gap_before_rescale(self):
        # the bare multi-cell vertex tile saturates a chain-intact gap of 2
        unscaled = build_tileset(8, lam=1.0, edge_weight=0.0)
        spec = verify_gap(unscaled, "1-tile")
        assert spec.gap == pytest.approx(2.0, abs=1e-9)

    def test_rejects_unknown_assembly(self):
        with pytest.raises(ColoringError):
            verify_gap(build_tileset(4), "3-tile")


class TestTileset:
    def test_rejects_trivial_q(self):
        with pytest.raises(ColoringError):
            build_tileset(1)

    def test_coupling_window(self):
        for q in (3, 4, 8):
            tiles = build_tileset(q).tiles
            for template in (
                tiles.vertex_tile,
                tiles.edge_horizontal,
                tiles.edge_vertical,
                tiles.chain_horizontal,
                tiles.chain_vertical,
            ):
                assert template.max_abs_quadratic() <= 1.0 + 1e-12

    def test_assembled_single_site_within_budget(self):
        # worst case: a tile flanked by two neighbor couplings
        from qubolattice.tiling import TilePlan, stitch

        tileset = build_tileset(4)
        plan = TilePlan(1, [["v0", "v1", "v2"]], 3)
        plan.adjacency_realization[(0, 1)] = ((0, 0), (0, 1))
        plan.adjacency_realization[(1, 2)] = ((0, 1), (0, 2))
        e = stitch(plan, tileset.tiles)
        assert e.physical.max_abs_linear() <= 2.0 + 1e-12
        assert e.physical.max_abs_quadratic() <= 1.0 + 1e-12


class TestCompile:
    def test_triangle_three_colors(self):
        inst = ColoringInstance(((0, 1), (1, 2), (0, 2)), 3)
        e = compile_coloring(inst)
        count, energy = count_ground_colorings(inst, e)
        assert count == 6
        report = validate(
            e.embedding, e.logical.interaction_edges(), range(e.logical.num_vars)
        )
        assert report.ok, report.summary()

    def test_single_vertex_q4(self):
        inst = ColoringInstance((), 4, num_vertices=1)
        e = compile_coloring(inst)
        count, _ = count_ground_colorings(inst, e)
        assert count == 4

    def test_edge_graph_one_color_infeasible(self):
        inst = ColoringInstance(((0, 1),), 1)
        e = compile_coloring(inst)
        tileset = None
        from qubolattice.coloring import _build_tileset_any

        tileset = _build_tileset_any(1)
        feasible = coloring_feasible_energy(inst, tileset)
        _, energy = count_ground_colorings(inst, e)
        assert energy > feasible + 1e-9

    @pytest.mark.parametrize("q", [2, 3, 4])
    def test_count_matches_oracle_small(self, q):
        from qubolattice.coloring import count_states_at_coloring_level, _build_tileset_any

        tileset = _build_tileset_any(q)
        for edges in [((0, 1),), ((0, 1), (1, 2)), ((0, 1), (1, 2), (0, 2))]:
            n = 1 + max(max(e) for e in edges)
            inst = ColoringInstance(edges, q, num_vertices=n)
            e = compile_coloring(inst, tileset)
            count = count_states_at_coloring_level(inst, e, tileset)
            assert count == proper_coloring_count(n, edges, q), (edges, q)


class TestGridSearch:
    def test_le4_recovers_paper_table(self):
        table, gap = grid_search_coefficients("le4", resolution=5)
        assert gap == pytest.approx(2.0, abs=1e-9)
        assert table["A"] == pytest.approx(1.0)
        assert table["B"] == pytest.approx(-2.0)
        assert table["C"] == pytest.approx(2.0)
        assert table["lambda"] == pytest.approx(0.5)
        assert table["D"] == pytest.approx(0.5)

    def test_le4_requires_resolution(self):
        with pytest.raises(ColoringError):
            grid_search_coefficients("le4", resolution=1)

    def test_gt4_budget_surface_peak(self):
        table, gap = grid_search_coefficients("gt4", resolution=5)
        assert gap <= 4.0 / 3.0 + 1e-9
        assert gap == pytest.approx(4.0 / 3.0, abs=1e-9)
        assert table["lambda"] == pytest.approx(2.0 / 3.0)
