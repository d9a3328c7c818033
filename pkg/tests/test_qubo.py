"""Core objective representation, transforms, and solvers."""

import math

import numpy as np
import pytest

from qubolattice.qubo import (
    BINARY,
    SPIN,
    NoiseModel,
    Qubo,
    QuboBuilder,
    QuboError,
    anneal_solve,
    apply_noise,
    brute_force,
    clamp,
    evaluate,
    normalize_couplings,
    qubo_from_doc,
    qubo_to_doc,
    restricted_gap,
    spectrum_of_states,
    to_binary,
    to_spin,
)


def one_hot_pair() -> Qubo:
    # (1 - x1 - x2)^2 expanded over bits
    q = Qubo(BINARY, 2)
    q.add_squared_affine(1.0, [(0, -1.0), (1, -1.0)])
    return q


def random_qubo(rng, n, domain=BINARY) -> Qubo:
    q = Qubo(domain, n)
    for i in range(n):
        q.add_linear(i, float(rng.integers(-3, 4)))
        for j in range(i + 1, n):
            if rng.random() < 0.6:
                q.add_quadratic(i, j, float(rng.integers(-3, 4)))
    q.add_offset(float(rng.integers(-2, 3)))
    return q


class TestEvaluate:
    def test_satisfied_unary_constraint(self):
        q = one_hot_pair()
        assert evaluate(q, (1, 0)) == 0.0
        assert evaluate(q, (0, 1)) == 0.0

    def test_double_assignment_costs_one(self):
        assert evaluate(one_hot_pair(), (1, 1)) == 1.0

    def test_constant_term(self):
        assert evaluate(one_hot_pair(), (0, 0)) == 1.0

    def test_rejects_wrong_length_and_domain(self):
        q = one_hot_pair()
        with pytest.raises(QuboError):
            evaluate(q, (1,))
        with pytest.raises(QuboError):
            evaluate(q, (1, -1))

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(7)
        q = random_qubo(rng, 6)
        states = ((np.arange(64)[:, None] >> np.arange(6)) & 1).astype(np.int8)
        vec = q.energies(states)
        for row, e in zip(states, vec):
            assert math.isclose(q.energy(tuple(int(v) for v in row)), e, abs_tol=1e-12)


class TestDomainConversion:
    def test_single_bit(self):
        q = Qubo(BINARY, 1)
        q.add_linear(0, 1.0)
        s = to_spin(q)
        assert math.isclose(s.energy((1,)), 1.0)
        assert math.isclose(s.energy((-1,)), 0.0)

    def test_product_coefficient(self):
        q = Qubo(BINARY, 2)
        q.add_quadratic(0, 1, 1.0)
        s = to_spin(q)
        assert math.isclose(s.quadratic[(0, 1)], 0.25)

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        q = random_qubo(rng, 5)
        back = to_binary(to_spin(q))
        assert math.isclose(back.offset, q.offset, abs_tol=1e-12)
        for i in range(5):
            assert math.isclose(back.linear.get(i, 0.0), q.linear.get(i, 0.0), abs_tol=1e-12)
        for key in set(back.quadratic) | set(q.quadratic):
            assert math.isclose(
                back.quadratic.get(key, 0.0), q.quadratic.get(key, 0.0), abs_tol=1e-12
            )

    def test_energy_preserved_on_all_assignments(self):
        rng = np.random.default_rng(11)
        for trial in range(20):
            q = random_qubo(rng, 5)
            s = to_spin(q)
            for code in range(32):
                bits = tuple((code >> k) & 1 for k in range(5))
                spins = tuple(2 * b - 1 for b in bits)
                assert math.isclose(q.energy(bits), s.energy(spins), abs_tol=1e-9)

    def test_domain_precondition(self):
        with pytest.raises(QuboError):
            to_spin(Qubo(SPIN, 1))
        with pytest.raises(QuboError):
            to_binary(Qubo(BINARY, 1))


class TestNormalize:
    def test_off_diagonal_binds(self):
        q = Qubo(SPIN, 2)
        q.add_quadratic(0, 1, 4.0)
        q.add_linear(0, 2.0)
        out, scale = normalize_couplings(q)
        assert scale == 0.25
        assert out.quadratic[(0, 1)] == 1.0
        assert out.linear[0] == 0.5

    def test_already_feasible(self):
        q = Qubo(SPIN, 2)
        q.add_quadratic(0, 1, -1.0)
        q.add_linear(1, 2.0)
        out, scale = normalize_couplings(q)
        assert scale == 1.0
        assert out.quadratic == q.quadratic

    def test_single_site_binds(self):
        q = Qubo(SPIN, 2)
        q.add_linear(0, 10.0)
        q.add_quadratic(0, 1, 1.0)
        out, scale = normalize_couplings(q)
        assert scale == pytest.approx(0.2)
        assert out.linear[0] == pytest.approx(2.0)

    def test_zero_objective_unchanged(self):
        q = Qubo(SPIN, 3)
        out, scale = normalize_couplings(q)
        assert scale == 1.0

    def test_argmin_preserved(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            q = random_qubo(rng, 6, SPIN)
            q.quadratic = {k: 5.0 * v for k, v in q.quadratic.items()}
            out, _ = normalize_couplings(q)
            assert set(brute_force(q).ground_states) == set(brute_force(out).ground_states)


class TestNoise:
    def base(self) -> Qubo:
        q = Qubo(SPIN, 4)
        q.add_linear(0, 1.0)
        q.add_quadratic(0, 1, -1.0)
        q.add_quadratic(2, 3, 0.5)
        return q

    def test_zero_scale_is_identity(self):
        q = self.base()
        out = apply_noise(q, NoiseModel(sigma_scale=0.0, seed=1))
        assert out.linear == q.linear and out.quadratic == q.quadratic

    def test_seed_determinism(self):
        q = self.base()
        a = apply_noise(q, NoiseModel(seed=42))
        b = apply_noise(q, NoiseModel(seed=42))
        assert a.linear == b.linear and a.quadratic == b.quadratic
        c = apply_noise(q, NoiseModel(seed=43))
        assert c.quadratic != a.quadratic

    def test_absent_couplers_stay_zero(self):
        q = self.base()
        out = apply_noise(q, NoiseModel(seed=9))
        assert (1, 2) not in out.quadratic

    def test_empirical_sigma(self):
        n = 10_000
        q = Qubo(SPIN, n)
        for i in range(n):
            q.add_linear(i, 1.0)
        out = apply_noise(q, NoiseModel(sigma_scale=0.03, seed=0))
        deltas = np.array([out.linear[i] - 1.0 for i in range(n)])
        assert abs(deltas.std() - 0.03) < 0.002


class TestBruteForce:
    def test_one_hot_pair(self):
        spec = brute_force(one_hot_pair())
        assert spec.ground_energy == 0.0
        assert set(spec.ground_states) == {(1, 0), (0, 1)}
        assert spec.gap == 1.0

    def test_ferromagnetic_pair(self):
        q = Qubo(SPIN, 2)
        q.add_quadratic(0, 1, 1.0)
        spec = brute_force(q)
        assert spec.ground_energy == -1.0
        assert spec.state_count_at_ground == 2
        assert spec.gap == 2.0

    def test_cap_refusal(self):
        with pytest.raises(QuboError):
            brute_force(Qubo(BINARY, 40))

    def test_degenerate_flag(self):
        spec = brute_force(Qubo(BINARY, 3))
        assert spec.degenerate and spec.gap == 0.0
        assert spec.state_count_at_ground == 8

    def test_relabel_invariance(self):
        rng = np.random.default_rng(17)
        q = random_qubo(rng, 6)
        perm = list(rng.permutation(6))
        shuffled = Qubo(BINARY, 6, q.offset)
        for i, c in q.linear.items():
            shuffled.add_linear(perm[i], c)
        for (i, j), c in q.quadratic.items():
            shuffled.add_quadratic(perm[i], perm[j], c)
        a, b = brute_force(q), brute_force(shuffled)
        assert math.isclose(a.ground_energy, b.ground_energy)
        assert math.isclose(a.gap, b.gap)
        remapped = {tuple(s[perm[k]] for k in range(6)) for s in b.ground_states}
        assert set(a.ground_states) == remapped


class TestRestricted:
    def test_full_predicate_matches_brute_force(self):
        q = one_hot_pair()
        full = restricted_gap(q, predicate=lambda s: True)
        ref = brute_force(q)
        assert full.ground_energy == ref.ground_energy
        assert set(full.ground_states) == set(ref.ground_states)
        assert full.gap == ref.gap

    def test_states_generator(self):
        q = one_hot_pair()
        spec = spectrum_of_states(q, [(0, 0), (1, 1)])
        assert spec.ground_energy == 1.0
        assert spec.degenerate

    def test_empty_subspace_errors(self):
        with pytest.raises(QuboError):
            restricted_gap(one_hot_pair(), predicate=lambda s: False)


class TestClamp:
    def test_identity(self):
        q = one_hot_pair()
        assert clamp(q, {}).num_vars == 2

    def test_fold_into_linear(self):
        q = Qubo(BINARY, 2, var_names=["x", "y"])
        q.add_quadratic(0, 1, 1.0)
        out = clamp(q, {"x": 1})
        assert out.num_vars == 1
        assert out.linear[0] == 1.0

    def test_clamp_all_gives_offset(self):
        q = one_hot_pair()
        out = clamp(q, {0: 1, 1: 1})
        assert out.num_vars == 0
        assert out.offset == q.energy((1, 1))

    def test_unknown_variable(self):
        with pytest.raises(QuboError):
            clamp(one_hot_pair(), {5: 1})

    def test_energy_function_preserved(self):
        rng = np.random.default_rng(23)
        q = random_qubo(rng, 6)
        out = clamp(q, {2: 1, 4: 0})
        for code in range(16):
            free = [(code >> k) & 1 for k in range(4)]
            full = free[:2] + [1] + [free[2]] + [0] + [free[3]]
            assert math.isclose(out.energy(tuple(free)), q.energy(tuple(full)), abs_tol=1e-12)


class TestAnneal:
    def test_matches_brute_force_on_suite(self):
        rng = np.random.default_rng(31)
        hits = 0
        trials = 40
        for t in range(trials):
            q = random_qubo(rng, 10, SPIN)
            best, energy = anneal_solve(q, sweeps=300, restarts=6, seed=t)
            assert math.isclose(energy, q.energy(best), abs_tol=1e-9)
            if math.isclose(energy, brute_force(q).ground_energy, abs_tol=1e-9):
                hits += 1
        assert hits / trials >= 0.95

    def test_zero_coefficients(self):
        q = Qubo(BINARY, 3, offset=2.5)
        _, energy = anneal_solve(q, sweeps=10, restarts=1, seed=0)
        assert energy == 2.5

    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(37)
        q = random_qubo(rng, 8, BINARY)
        a = anneal_solve(q, sweeps=50, restarts=3, seed=5)
        b = anneal_solve(q, sweeps=50, restarts=3, seed=5)
        assert a == b


class TestBuilderAndDocs:
    def test_builder_names(self):
        b = QuboBuilder(BINARY)
        b.add_squared_affine(1.0, [("u", -1.0), ("v", -1.0)])
        q = b.build()
        assert q.var_names == ["u", "v"]
        assert q.energy((1, 0)) == 0.0

    def test_doc_round_trip(self):
        rng = np.random.default_rng(41)
        q = random_qubo(rng, 5, SPIN)
        q.var_names = [f"s{i}" for i in range(5)]
        back = qubo_from_doc(qubo_to_doc(q))
        assert back.domain == q.domain
        assert back.var_names == q.var_names
        assert back.linear == q.linear
        assert back.quadratic == q.quadratic
