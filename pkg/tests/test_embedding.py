"""Minor embedding validation, constructive embeddings, chain penalties."""

import math

import pytest

from qubolattice.embedding import (
    EmbeddingError,
    MinorEmbedding,
    choose_alpha,
    embed_complete_chimera,
    embed_complete_generic,
    embed_qubo,
    embedding_from_doc,
    embedding_to_doc,
    unembed,
    validate,
)
from qubolattice.lattice import build_lattice, chimera_spec
from qubolattice.qubo import BINARY, SPIN, Qubo, brute_force


def complete_edges(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


class TestValidate:
    def test_fig2_style_k8(self):
        emb = embed_complete_chimera(8, 4)
        assert emb.lattice.L == 2
        assert validate(emb, complete_edges(8)).ok

    def test_single_vertex_chains_on_edge(self):
        spec = chimera_spec(4, 1)
        g = build_lattice(spec)
        emb = MinorEmbedding(spec, {0: frozenset({g.vertex(0, 0, 0)}), 1: frozenset({g.vertex(0, 0, 4)})})
        assert validate(emb, [(0, 1)]).ok

    def test_shared_vertex_reported(self):
        spec = chimera_spec(4, 1)
        emb = MinorEmbedding(spec, {0: frozenset({0, 4}), 1: frozenset({4, 1})})
        report = validate(emb, [(0, 1)])
        assert not report.ok
        assert any(kind == "overlapping-chains" for kind, _ in report.violations)

    def test_disconnected_chain_reported(self):
        spec = chimera_spec(4, 1)
        emb = MinorEmbedding(spec, {0: frozenset({0, 1})})  # same side, no intra edge
        report = validate(emb, [])
        assert any(kind == "disconnected-chain" for kind, _ in report.violations)

    def test_missing_edge_reported(self):
        spec = chimera_spec(4, 2)
        g = build_lattice(spec)
        chains = {0: frozenset({g.vertex(0, 0, 0)}), 1: frozenset({g.vertex(1, 1, 0)})}
        report = validate(MinorEmbedding(spec, chains), [(0, 1)])
        assert any(kind == "unrealizable-edge" for kind, _ in report.violations)


class TestCompleteEmbeddings:
    def test_chimera_sizes(self):
        for n, expected_l in [(8, 2), (4, 1), (9, 3)]:
            emb = embed_complete_chimera(n, 4)
            assert emb.lattice.L == expected_l
            assert validate(emb, complete_edges(n)).ok

    def test_chain_lengths(self):
        emb = embed_complete_chimera(8, 4)
        assert all(len(c) == 4 for c in emb.chains.values())
        emb = embed_complete_chimera(4, 4)
        assert all(len(c) == 2 for c in emb.chains.values())

    def test_all_small_cases(self):
        for J in (1, 2, 4):
            for n in range(1, 17):
                emb = embed_complete_chimera(n, J)
                assert emb.lattice.L == max(1, math.ceil(n / J))
                assert validate(emb, complete_edges(n)).ok

    def test_generic_k3(self):
        emb = embed_complete_generic(3, chimera_spec(4, 3), 0, 4)
        assert validate(emb, complete_edges(3)).ok
        assert all(len(c) == 6 for c in emb.chains.values())

    def test_generic_single_vertex(self):
        emb = embed_complete_generic(1, chimera_spec(4, 1), 0, 4)
        assert len(emb.chains[0]) == 2

    def test_generic_refuses_small_lattice(self):
        with pytest.raises(EmbeddingError):
            embed_complete_generic(3, chimera_spec(4, 2), 0, 4)

    def test_generic_refuses_bad_roles(self):
        with pytest.raises(EmbeddingError):
            embed_complete_generic(2, chimera_spec(4, 2), 0, 1)


class TestChooseAlpha:
    def test_zero_objective(self):
        assert choose_alpha(Qubo(BINARY, 2)) == 1.0

    def test_one_hot_pair(self):
        q = Qubo(BINARY, 2)
        q.add_squared_affine(1.0, [(0, -1.0), (1, -1.0)])
        assert choose_alpha(q) == 4.0

    def test_ferromagnetic_pair(self):
        q = Qubo(SPIN, 2)
        q.add_quadratic(0, 1, -1.0)
        assert choose_alpha(q) == 2.0


class TestEmbedQubo:
    def test_identity_embedding(self):
        spec = chimera_spec(4, 1)
        g = build_lattice(spec)
        q = Qubo(BINARY, 2)
        q.add_squared_affine(1.0, [(0, -1.0), (1, -1.0)])
        chains = {0: frozenset({g.vertex(0, 0, 0)}), 1: frozenset({g.vertex(0, 0, 4)})}
        emb = MinorEmbedding(spec, chains, alpha=choose_alpha(q))
        e = embed_qubo(q, emb)
        assert e.physical.num_vars == 2
        assert e.physical.offset == q.offset
        assert sorted(e.physical.quadratic.values()) == sorted(q.quadratic.values())

    def test_two_vertex_chain_gap(self):
        spec = chimera_spec(4, 1)
        g = build_lattice(spec)
        q = Qubo(BINARY, 1)
        emb = MinorEmbedding(
            spec, {0: frozenset({g.vertex(0, 0, 0), g.vertex(0, 0, 4)})}, alpha=1.5
        )
        e = embed_qubo(q, emb)
        spec_out = brute_force(e.physical)
        assert spec_out.ground_energy == 0.0
        assert set(spec_out.ground_states) == {(0, 0), (1, 1)}
        assert spec_out.gap == pytest.approx(2 * 1.5)

    def test_one_hot_through_k8_embedding(self):
        q = Qubo(BINARY, 2)
        q.add_squared_affine(1.0, [(0, -1.0), (1, -1.0)])
        emb8 = embed_complete_chimera(8, 4)
        emb = MinorEmbedding(emb8.lattice, {0: emb8.chains[0], 1: emb8.chains[1]}, alpha=choose_alpha(q))
        e = embed_qubo(q, emb)
        spec_out = brute_force(e.physical)
        assert spec_out.ground_energy == 0.0
        decoded = {unembed(e, s)[0] for s in spec_out.ground_states}
        assert decoded == {(1, 0), (0, 1)}
        assert all(unembed(e, s)[1] == 0 for s in spec_out.ground_states)

    def test_quadratic_placed_on_lattice_edges_only(self):
        q = Qubo(SPIN, 3)
        for i, j in complete_edges(3):
            q.add_quadratic(i, j, -1.0)
        emb = embed_complete_chimera(3, 2)
        emb.alpha = choose_alpha(q)
        e = embed_qubo(q, emb)
        g = e.embedding.graph
        for (k1, k2) in e.physical.quadratic:
            assert g.has_edge(e.vertex_order[k1], e.vertex_order[k2])

    def test_missing_physical_edge_raises(self):
        spec = chimera_spec(4, 2)
        g = build_lattice(spec)
        q = Qubo(BINARY, 2)
        q.add_quadratic(0, 1, 1.0)
        chains = {0: frozenset({g.vertex(0, 0, 0)}), 1: frozenset({g.vertex(1, 1, 0)})}
        with pytest.raises(EmbeddingError):
            embed_qubo(q, MinorEmbedding(spec, chains, alpha=2.0))

    def test_ground_energy_preserved(self):
        q = Qubo(SPIN, 4)
        for i, j in complete_edges(4):
            q.add_quadratic(i, j, 1.0 if (i + j) % 2 else -1.0)
        q.add_linear(0, 0.5)
        emb = embed_complete_chimera(4, 2)
        emb.alpha = choose_alpha(q)
        e = embed_qubo(q, emb)
        phys = brute_force(e.physical)
        logical = brute_force(q)
        assert math.isclose(phys.ground_energy, logical.ground_energy, abs_tol=1e-9)
        for s in phys.ground_states:
            decoded, broken = unembed(e, s)
            assert broken == 0
            assert math.isclose(q.energy(decoded), logical.ground_energy, abs_tol=1e-9)

    def test_chain_intact_restriction_matches_lift(self):
        q = Qubo(BINARY, 3)
        q.add_squared_affine(1.0, [(0, -1.0), (1, -1.0), (2, -1.0)])
        emb = embed_complete_chimera(3, 4)
        emb.alpha = choose_alpha(q)
        e = embed_qubo(q, emb)
        eff = e.chain_intact_qubo()
        for code in range(8):
            bits = tuple((code >> k) & 1 for k in range(3))
            assert math.isclose(eff.energy(bits), e.physical.energy(e.lift(bits)), abs_tol=1e-9)


class TestUnembed:
    def _embedded(self):
        q = Qubo(BINARY, 1)
        spec = chimera_spec(4, 1)
        g = build_lattice(spec)
        chain = frozenset({g.vertex(0, 0, 0), g.vertex(0, 0, 4), g.vertex(0, 0, 1)})
        emb = MinorEmbedding(spec, {0: chain}, alpha=1.0)
        return embed_qubo(q, emb)

    def test_unanimous(self):
        e = self._embedded()
        assert unembed(e, (1, 1, 1)) == ((1,), 0)
        assert unembed(e, (0, 0, 0)) == ((0,), 0)

    def test_majority(self):
        e = self._embedded()
        logical, broken = unembed(e, (1, 1, 0))
        assert logical == (1,) and broken == 1

    def test_tie_breaks_to_zero(self):
        q = Qubo(BINARY, 1)
        spec = chimera_spec(4, 1)
        g = build_lattice(spec)
        emb = MinorEmbedding(spec, {0: frozenset({g.vertex(0, 0, 0), g.vertex(0, 0, 4)})})
        e = embed_qubo(q, emb)
        logical, broken = unembed(e, (1, 0))
        assert logical == (0,) and broken == 1


class TestEmbeddingDocs:
    def test_round_trip(self):
        emb = embed_complete_chimera(5, 4)
        emb.alpha = 2.5
        doc = embedding_to_doc(emb)
        back = embedding_from_doc(doc)
        assert back.lattice == emb.lattice
        assert back.alpha == emb.alpha
        assert back.chains == emb.chains
