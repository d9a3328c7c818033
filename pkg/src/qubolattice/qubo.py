"""Sparse quadratic binary/spin objectives and the solvers used to verify them.

A :class:`Qubo` stores an objective

    E(x) = offset + sum_i linear[i] * x_i + sum_{i<j} quadratic[i, j] * x_i * x_j

over binary variables (``x_i in {0, 1}``) or spins (``s_i in {-1, +1}``).
Everything downstream of the compilers (brute-force spectra, simulated
annealing, coupling normalization, hardware-noise modeling) lives here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

BINARY = "binary"
SPIN = "spin"

#: Tolerance used when comparing energies of rationally-constructed objectives.
COEFF_TOL = 1e-9

#: Default variable cap for exhaustive enumeration (~2.7e8 evaluations).
BRUTE_FORCE_CAP = 28

_BLOCK = 1 << 16


class QuboError(ValueError):
    """Invalid parameter or assignment handed to a QUBO operation."""


def _canonical_pair(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise QuboError(f"quadratic term requires two distinct variables, got ({i}, {j})")
    return (i, j) if i < j else (j, i)


@dataclass
class Qubo:
    """Sparse quadratic form over named binary or spin variables."""

    domain: str
    num_vars: int
    offset: float = 0.0
    linear: dict[int, float] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], float] = field(default_factory=dict)
    var_names: list[str] | None = None

    def __post_init__(self) -> None:
        if self.domain not in (BINARY, SPIN):
            raise QuboError(f"unknown domain {self.domain!r}")
        if self.var_names is not None and len(self.var_names) != self.num_vars:
            raise QuboError("var_names length does not match num_vars")

    # -- construction helpers -------------------------------------------------

    def add_offset(self, c: float) -> None:
        self.offset += c

    def add_linear(self, i: int, c: float) -> None:
        if not 0 <= i < self.num_vars:
            raise QuboError(f"variable {i} out of range")
        if c == 0.0:
            return
        new = self.linear.get(i, 0.0) + c
        if new == 0.0:
            self.linear.pop(i, None)
        else:
            self.linear[i] = new

    def add_quadratic(self, i: int, j: int, c: float) -> None:
        key = _canonical_pair(i, j)
        if not (0 <= key[0] and key[1] < self.num_vars):
            raise QuboError(f"variable pair {key} out of range")
        if c == 0.0:
            return
        new = self.quadratic.get(key, 0.0) + c
        if new == 0.0:
            self.quadratic.pop(key, None)
        else:
            self.quadratic[key] = new

    def add_squared_affine(self, const: float, terms: Sequence[tuple[int, float]]) -> None:
        """Add (const + sum coeff_k * v_k)**2, expanded for this domain.

        Squares of variables reduce per the domain: x**2 = x for binary,
        s**2 = 1 for spin.
        """
        self.add_offset(const * const)
        for i, a in terms:
            if self.domain == BINARY:
                self.add_linear(i, a * a + 2.0 * const * a)
            else:
                self.add_offset(a * a)
                self.add_linear(i, 2.0 * const * a)
        for k, (i, a) in enumerate(terms):
            for j, b in terms[k + 1 :]:
                if i == j:
                    raise QuboError("repeated variable inside squared expression")
                self.add_quadratic(i, j, 2.0 * a * b)

    def copy(self) -> "Qubo":
        return Qubo(
            self.domain,
            self.num_vars,
            self.offset,
            dict(self.linear),
            dict(self.quadratic),
            list(self.var_names) if self.var_names is not None else None,
        )

    # -- lookups ---------------------------------------------------------------

    def name_of(self, i: int) -> str:
        if self.var_names is not None:
            return self.var_names[i]
        return str(i)

    def index_of(self, name: str) -> int:
        if self.var_names is None:
            raise QuboError("qubo has no variable names")
        try:
            return self.var_names.index(name)
        except ValueError:
            raise QuboError(f"unknown variable {name!r}") from None

    def interaction_edges(self) -> set[tuple[int, int]]:
        """Pairs with a nonzero quadratic coefficient."""
        return {k for k, v in self.quadratic.items() if v != 0.0}

    def max_abs_quadratic(self) -> float:
        return max((abs(v) for v in self.quadratic.values()), default=0.0)

    def max_abs_linear(self) -> float:
        return max((abs(v) for v in self.linear.values()), default=0.0)

    # -- evaluation --------------------------------------------------------

    def _domain_values(self) -> tuple[int, int]:
        return (0, 1) if self.domain == BINARY else (-1, 1)

    def check_assignment(self, assignment: Sequence[float]) -> None:
        if len(assignment) != self.num_vars:
            raise QuboError(
                f"assignment length {len(assignment)} != num_vars {self.num_vars}"
            )
        lo, hi = self._domain_values()
        for v in assignment:
            if v != lo and v != hi:
                raise QuboError(f"value {v!r} outside domain {self.domain}")

    def energy(self, assignment: Sequence[float]) -> float:
        self.check_assignment(assignment)
        e = self.offset
        for i, c in self.linear.items():
            e += c * assignment[i]
        for (i, j), c in self.quadratic.items():
            e += c * assignment[i] * assignment[j]
        return e

    def _dense_terms(self) -> tuple[np.ndarray, np.ndarray]:
        l = np.zeros(self.num_vars)
        for i, c in self.linear.items():
            l[i] = c
        u = np.zeros((self.num_vars, self.num_vars))
        for (i, j), c in self.quadratic.items():
            u[i, j] = c
        return l, u

    def energies(self, states: np.ndarray) -> np.ndarray:
        """Vectorized energies for a (num_states, num_vars) array of assignments."""
        states = np.asarray(states, dtype=np.float64)
        l, u = self._dense_terms()
        return self.offset + states @ l + np.einsum("si,si->s", states @ u, states)


@dataclass
class Spectrum:
    """Exact low-energy summary of an objective."""

    ground_energy: float
    ground_states: list[tuple[int, ...]]
    gap: float
    state_count_at_ground: int
    degenerate: bool = False


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian control noise on every realized coupler, seed-deterministic."""

    sigma_scale: float = 0.03
    seed: int = 0


def evaluate(q: Qubo, assignment: Sequence[float]) -> float:
    """Exact energy of an assignment; raises on wrong length or domain."""
    return q.energy(assignment)


def to_spin(q: Qubo) -> Qubo:
    """Rewrite a binary objective over spins via x = (1 + s) / 2."""
    if q.domain != BINARY:
        raise QuboError("to_spin expects a binary-domain qubo")
    out = Qubo(SPIN, q.num_vars, q.offset, var_names=list(q.var_names) if q.var_names else None)
    for i, c in q.linear.items():
        out.add_offset(c / 2.0)
        out.add_linear(i, c / 2.0)
    for (i, j), c in q.quadratic.items():
        out.add_offset(c / 4.0)
        out.add_linear(i, c / 4.0)
        out.add_linear(j, c / 4.0)
        out.add_quadratic(i, j, c / 4.0)
    return out


def to_binary(q: Qubo) -> Qubo:
    """Rewrite a spin objective over bits via s = 2x - 1."""
    if q.domain != SPIN:
        raise QuboError("to_binary expects a spin-domain qubo")
    out = Qubo(BINARY, q.num_vars, q.offset, var_names=list(q.var_names) if q.var_names else None)
    for i, c in q.linear.items():
        out.add_offset(-c)
        out.add_linear(i, 2.0 * c)
    for (i, j), c in q.quadratic.items():
        out.add_offset(c)
        out.add_linear(i, -2.0 * c)
        out.add_linear(j, -2.0 * c)
        out.add_quadratic(i, j, 4.0 * c)
    return out


def spin_assignment(binary_assignment: Sequence[int]) -> tuple[int, ...]:
    return tuple(2 * x - 1 for x in binary_assignment)


def binary_assignment(spin_assignment: Sequence[int]) -> tuple[int, ...]:
    return tuple((s + 1) // 2 for s in spin_assignment)


def normalize_couplings(q: Qubo) -> tuple[Qubo, float]:
    """Rescale a spin objective into the hardware coupling window.

    One positive scalar multiplies every coefficient so that off-diagonal
    magnitudes are at most 1 and single-site magnitudes at most 2.  The argmin
    set is unchanged.  Returns the scaled qubo and the scale applied.
    """
    if q.domain != SPIN:
        raise QuboError("normalize_couplings expects a spin-domain qubo")
    worst = max(1.0, q.max_abs_quadratic(), q.max_abs_linear() / 2.0)
    if worst == 1.0:
        return q.copy(), 1.0
    scale = 1.0 / worst
    out = q.copy()
    out.offset *= scale
    out.linear = {i: c * scale for i, c in out.linear.items()}
    out.quadratic = {k: c * scale for k, c in out.quadratic.items()}
    return out, scale


def apply_noise(q: Qubo, model: NoiseModel) -> Qubo:
    """Perturb every structurally-present coefficient by sigma_scale * N(0, 1).

    Absent couplers stay exactly zero, mirroring hardware where there is no
    physical coupler to mis-set.  Deterministic for a fixed seed.
    """
    if q.domain != SPIN:
        raise QuboError("apply_noise expects a spin-domain qubo")
    rng = np.random.default_rng(model.seed)
    out = q.copy()
    for i in sorted(out.linear):
        out.linear[i] += model.sigma_scale * rng.standard_normal()
    for key in sorted(out.quadratic):
        out.quadratic[key] += model.sigma_scale * rng.standard_normal()
    return out


def _iter_state_blocks(num_vars: int, domain: str) -> Iterable[np.ndarray]:
    total = 1 << num_vars
    shifts = np.arange(num_vars, dtype=np.uint64)
    for start in range(0, total, _BLOCK):
        stop = min(start + _BLOCK, total)
        codes = np.arange(start, stop, dtype=np.uint64)
        bits = ((codes[:, None] >> shifts) & 1).astype(np.int8)
        if domain == SPIN:
            bits = 2 * bits - 1
        yield bits


def _spectrum_from_batches(
    batches: Iterable[tuple[np.ndarray, np.ndarray]], tol: float
) -> Spectrum:
    # Collect a superset of ground states against a running threshold, then
    # re-filter once the true minimum is known.
    running = math.inf
    above_min = math.inf
    kept: list[tuple[float, tuple[int, ...]]] = []
    seen = False
    for block, energies in batches:
        if len(energies) == 0:
            continue
        seen = True
        running = min(running, float(energies.min()))
        near = energies <= running + tol
        for row, e in zip(block[near], energies[near]):
            kept.append((float(e), tuple(int(v) for v in row)))
        rest = energies[~near]
        if rest.size:
            above_min = min(above_min, float(rest.min()))
    if not seen:
        raise QuboError("empty subspace: no states to take a spectrum over")
    ground = min(e for e, _ in kept)
    states = [s for e, s in kept if e <= ground + tol]
    excited = [e for e, _ in kept if e > ground + tol]
    if not math.isinf(above_min):
        excited.append(above_min)
    if not excited:
        return Spectrum(ground, states, 0.0, len(states), degenerate=True)
    return Spectrum(ground, states, min(excited) - ground, len(states))


def brute_force(q: Qubo, cap: int = BRUTE_FORCE_CAP, tol: float = COEFF_TOL) -> Spectrum:
    """Exhaustive spectrum over all 2**num_vars assignments.

    Refuses above `cap` variables; ties at the ground level are collected
    exhaustively.
    """
    if q.num_vars > cap:
        raise QuboError(
            f"brute_force refused: {q.num_vars} variables exceed cap {cap}"
        )
    if q.num_vars == 0:
        return Spectrum(q.offset, [()], 0.0, 1, degenerate=True)

    def batches():
        for block in _iter_state_blocks(q.num_vars, q.domain):
            yield block, q.energies(block)

    return _spectrum_from_batches(batches(), tol)


def spectrum_of_states(q: Qubo, states: Iterable[Sequence[int]], tol: float = COEFF_TOL) -> Spectrum:
    """Exact spectrum restricted to an explicit collection of assignments."""
    rows = [tuple(int(v) for v in s) for s in states]
    if not rows:
        raise QuboError("empty subspace: no states to take a spectrum over")
    arr = np.asarray(rows, dtype=np.int8)

    def batches():
        for start in range(0, len(rows), _BLOCK):
            block = arr[start : start + _BLOCK]
            yield block, q.energies(block)

    return _spectrum_from_batches(batches(), tol)


def restricted_gap(
    q: Qubo,
    predicate: Callable[[tuple[int, ...]], bool] | None = None,
    states: Iterable[Sequence[int]] | None = None,
    cap: int = BRUTE_FORCE_CAP,
    tol: float = COEFF_TOL,
) -> Spectrum:
    """Spectrum restricted to a subspace.

    The subspace is either an explicit iterable of assignments (`states`) or
    the subset of the full state space satisfying `predicate`.
    """
    if states is not None:
        return spectrum_of_states(q, states, tol)
    if predicate is None:
        raise QuboError("restricted_gap needs a predicate or a state generator")
    if q.num_vars > cap:
        raise QuboError(
            f"restricted_gap refused: {q.num_vars} variables exceed cap {cap} "
            "and no state generator was given"
        )

    def batches():
        for block in _iter_state_blocks(q.num_vars, q.domain):
            keep = np.fromiter(
                (predicate(tuple(int(v) for v in row)) for row in block),
                dtype=bool,
                count=len(block),
            )
            sub = block[keep]
            yield sub, q.energies(sub) if len(sub) else np.empty(0)

    return _spectrum_from_batches(batches(), tol)


def clamp(q: Qubo, assignments: Mapping[int | str, int]) -> Qubo:
    """Substitute constants for some variables and drop them.

    Keys may be indices or variable names.  The energy function over the
    remaining free variables is unchanged.
    """
    fixed: dict[int, int] = {}
    lo, hi = (0, 1) if q.domain == BINARY else (-1, 1)
    for key, value in assignments.items():
        idx = q.index_of(key) if isinstance(key, str) else int(key)
        if not 0 <= idx < q.num_vars:
            raise QuboError(f"unknown variable {key!r}")
        if value != lo and value != hi:
            raise QuboError(f"clamp value {value!r} outside domain {q.domain}")
        fixed[idx] = int(value)
    keep = [i for i in range(q.num_vars) if i not in fixed]
    remap = {old: new for new, old in enumerate(keep)}
    names = [q.name_of(i) for i in keep] if q.var_names is not None else None
    out = Qubo(q.domain, len(keep), q.offset, var_names=names)
    for i, c in q.linear.items():
        if i in fixed:
            out.add_offset(c * fixed[i])
        else:
            out.add_linear(remap[i], c)
    for (i, j), c in q.quadratic.items():
        fi, fj = i in fixed, j in fixed
        if fi and fj:
            out.add_offset(c * fixed[i] * fixed[j])
        elif fi:
            out.add_linear(remap[j], c * fixed[i])
        elif fj:
            out.add_linear(remap[i], c * fixed[j])
        else:
            out.add_quadratic(remap[i], remap[j], c)
    return out


def anneal_solve(
    q: Qubo,
    sweeps: int = 400,
    restarts: int = 8,
    seed: int = 0,
    t_hot: float | None = None,
    t_cold: float = 0.05,
) -> tuple[tuple[int, ...], float]:
    """Single-spin-flip Metropolis annealing with a geometric schedule.

    Deterministic for a fixed seed; returns the best assignment found over all
    restarts together with its energy.
    """
    if q.num_vars == 0:
        return (), q.offset
    rng = np.random.default_rng(seed)
    l, u = q._dense_terms()
    coupling = u + u.T
    local_bound = np.abs(l) + np.abs(coupling).sum(axis=1)
    if t_hot is None:
        t_hot = max(1.0, float(local_bound.max()))
    lo, hi = (0.0, 1.0) if q.domain == BINARY else (-1.0, 1.0)
    temps = t_hot * (t_cold / t_hot) ** (np.arange(sweeps) / max(1, sweeps - 1))

    best_state: np.ndarray | None = None
    best_energy = math.inf
    n = q.num_vars
    for _ in range(max(1, restarts)):
        state = np.where(rng.random(n) < 0.5, lo, hi)
        field_vec = l + coupling @ state
        energy = float(q.energies(state[None, :])[0])
        for t in temps:
            accept_draws = rng.random(n)
            for i in range(n):
                old = state[i]
                new = hi if old == lo else lo
                delta = (new - old) * field_vec[i]
                if delta <= 0.0 or accept_draws[i] < math.exp(-delta / t):
                    state[i] = new
                    energy += delta
                    field_vec += (new - old) * coupling[:, i]
        if energy < best_energy - COEFF_TOL:
            best_energy = energy
            best_state = state.copy()
    assert best_state is not None
    result = tuple(int(v) for v in best_state)
    return result, q.energy(result)


class QuboBuilder:
    """Accumulates terms keyed by hashable variable names, then emits a Qubo."""

    def __init__(self, domain: str = BINARY):
        self.domain = domain
        self._index: dict[str, int] = {}
        self._names: list[str] = []
        self._offset = 0.0
        self._linear: dict[int, float] = {}
        self._quadratic: dict[tuple[int, int], float] = {}

    def var(self, name: str) -> int:
        if name not in self._index:
            self._index[name] = len(self._names)
            self._names.append(name)
        return self._index[name]

    def has(self, name: str) -> bool:
        return name in self._index

    def add_offset(self, c: float) -> None:
        self._offset += c

    def add_linear(self, name: str, c: float) -> None:
        i = self.var(name)
        self._linear[i] = self._linear.get(i, 0.0) + c

    def add_quadratic(self, n1: str, n2: str, c: float) -> None:
        key = _canonical_pair(self.var(n1), self.var(n2))
        self._quadratic[key] = self._quadratic.get(key, 0.0) + c

    def add_squared_affine(self, const: float, terms: Sequence[tuple[str, float]]) -> None:
        indices = [(self.var(n), a) for n, a in terms]
        # route through a throwaway Qubo-compatible expansion
        self._offset += const * const
        for i, a in indices:
            if self.domain == BINARY:
                self._linear[i] = self._linear.get(i, 0.0) + a * a + 2.0 * const * a
            else:
                self._offset += a * a
                self._linear[i] = self._linear.get(i, 0.0) + 2.0 * const * a
        for k, (i, a) in enumerate(indices):
            for j, b in indices[k + 1 :]:
                key = _canonical_pair(i, j)
                self._quadratic[key] = self._quadratic.get(key, 0.0) + 2.0 * a * b
    def build(self) -> Qubo:
        q = Qubo(self.domain, len(self._names), self._offset, var_names=list(self._names))
        for i, c in self._linear.items():
            if c != 0.0:
                q.linear[i] = c
        for key, c in self._quadratic.items():
            if c != 0.0:
                q.quadratic[key] = c
        return q


def qubo_to_doc(q: Qubo) -> dict:
    """Serializable document form; pairs stored with i < j."""
    doc = {
        "domain": q.domain,
        "num_vars": q.num_vars,
        "offset": q.offset,
        "linear": [[i, c] for i, c in sorted(q.linear.items())],
        "quadratic": [[i, j, c] for (i, j), c in sorted(q.quadratic.items())],
    }
    if q.var_names is not None:
        doc["var_names"] = list(q.var_names)
    return doc


def qubo_from_doc(doc: Mapping) -> Qubo:
    q = Qubo(
        doc["domain"],
        int(doc["num_vars"]),
        float(doc.get("offset", 0.0)),
        var_names=list(doc["var_names"]) if "var_names" in doc else None,
    )
    for i, c in doc.get("linear", []):
        q.add_linear(int(i), float(c))
    for i, j, c in doc.get("quadratic", []):
        q.add_quadratic(int(i), int(j), float(c))
    return q
