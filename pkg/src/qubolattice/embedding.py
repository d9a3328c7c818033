"""Minor embeddings: validation, constructive complete-graph embeddings,
chain-penalty translation of logical QUBOs onto lattices, and unembedding.

A minor embedding maps each logical vertex to a chain, a connected set of
lattice vertices; chains are pairwise disjoint, and every logical edge must be
realizable by at least one lattice edge between the two chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .lattice import (
    LatticeError,
    LatticeGraph,
    LatticeSpec,
    build_lattice,
    chimera_spec,
    detect_chimera,
    lattice_from_doc,
    lattice_to_doc,
)
from .qubo import BINARY, SPIN, Qubo, QuboError


class EmbeddingError(ValueError):
    """Embedding construction failed or preconditions were violated."""


@dataclass
class MinorEmbedding:
    """Logical vertex -> physical chain map on a lattice, plus penalty weight."""

    lattice: LatticeSpec
    chains: dict[int, frozenset[int]]
    alpha: float = 1.0

    @cached_property
    def graph(self) -> LatticeGraph:
        return build_lattice(self.lattice)

    def physical_vertices(self) -> list[int]:
        out: set[int] = set()
        for chain in self.chains.values():
            out.update(chain)
        return sorted(out)


@dataclass
class ValidationReport:
    violations: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, detail: str) -> None:
        self.violations.append((kind, detail))

    def summary(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(f"{k}: {d}" for k, d in self.violations)


def _chain_connected(graph: LatticeGraph, chain: frozenset[int]) -> bool:
    if not chain:
        return False
    start = next(iter(chain))
    seen = {start}
    frontier = [start]
    while frontier:
        u = frontier.pop()
        for w in graph.neighbors(u):
            if w in chain and w not in seen:
                seen.add(w)
                frontier.append(w)
    return seen == chain


def validate(
    emb: MinorEmbedding,
    logical_edges: Iterable[tuple[int, int]],
    logical_vertices: Iterable[int] | None = None,
) -> ValidationReport:
    """Check the three minor-embedding properties; violations become report
    entries with witnesses, never exceptions."""
    report = ValidationReport()
    graph = emb.graph
    vertices = set(logical_vertices) if logical_vertices is not None else set(emb.chains)
    for v in vertices:
        chain = emb.chains.get(v)
        if not chain:
            report.add("missing-chain", f"logical vertex {v} has no chain")
            continue
        bad = [p for p in chain if not 0 <= p < graph.num_vertices]
        if bad:
            report.add("out-of-lattice", f"vertex {v} chain uses {bad}")
            continue
        if not _chain_connected(graph, chain):
            report.add("disconnected-chain", f"vertex {v} chain {sorted(chain)}")
    owner: dict[int, int] = {}
    for v, chain in emb.chains.items():
        for p in chain:
            if p in owner:
                report.add(
                    "overlapping-chains",
                    f"physical vertex {p} shared by {owner[p]} and {v}",
                )
            else:
                owner[p] = v
    for u, v in logical_edges:
        cu, cv = emb.chains.get(u), emb.chains.get(v)
        if not cu or not cv:
            report.add("unrealizable-edge", f"({u}, {v}): missing chain")
            continue
        if not any(graph.has_edge(p, q) for p in cu for q in cv):
            report.add("unrealizable-edge", f"({u}, {v}): no lattice edge between chains")
    return report


def embed_complete_generic(
    N: int, spec: LatticeSpec, u_role: int, v_role: int
) -> MinorEmbedding:
    """Row/column cross embedding of K_N on any cell family with suitable roles.

    Logical i occupies the u-role vertex across lattice row i and the v-role
    vertex down column i; the two arms meet (and couple) in the diagonal cell.
    Requires an intra-cell edge between the roles, a track-aligned horizontal
    coupler on u and a vertical one on v, and side length at least N.
    """
    cell = spec.cell
    if not (0 <= u_role < cell.n and 0 <= v_role < cell.n):
        raise EmbeddingError("role indices outside the cell")
    if cell.A[u_role][v_role] != 1:
        raise EmbeddingError("roles are not adjacent inside the cell")
    if cell.A_h[u_role][u_role] != 1:
        raise EmbeddingError("u role has no track-aligned horizontal coupler")
    if cell.A_v[v_role][v_role] != 1:
        raise EmbeddingError("v role has no track-aligned vertical coupler")
    if spec.width < N or spec.height < N:
        raise EmbeddingError(f"lattice side must be at least N={N}")
    graph = build_lattice(spec)
    chains: dict[int, frozenset[int]] = {}
    for i in range(N):
        members = set()
        for x in range(N):
            members.add(graph.vertex(x, i, u_role))
        for y in range(N):
            members.add(graph.vertex(i, y, v_role))
        chains[i] = frozenset(members)
    return MinorEmbedding(spec, chains)


def embed_complete_chimera(N: int, J: int) -> MinorEmbedding:
    """Triangular half-grid embedding of K_N on chimera(J) with L = ceil(N/J).

    Logical i (block b = i // J, track a = i % J) runs horizontally through
    row block b on left-side track a and vertically through column block b on
    the right side, turning at the diagonal cell.  Chains have 2L vertices.
    """
    if N < 1:
        raise EmbeddingError("N must be positive")
    if J < 1:
        raise EmbeddingError("J must be positive")
    L = max(1, math.ceil(N / J))
    spec = chimera_spec(J, L)
    graph = build_lattice(spec)
    chains: dict[int, frozenset[int]] = {}
    for i in range(N):
        b, a = divmod(i, J)
        members = set()
        for x in range(L):
            members.add(graph.vertex(x, b, a))
        for y in range(L):
            members.add(graph.vertex(b, y, J + a))
        chains[i] = frozenset(members)
    return MinorEmbedding(spec, chains)


def choose_alpha(logical: Qubo) -> float:
    """Chain penalty that no single chain member can out-bid.

    Flipping one member of chain v changes the objective by at most the total
    coupling incident to v plus its field; one unit of margin is added.
    """
    worst = 0.0
    for v in range(logical.num_vars):
        total = abs(logical.linear.get(v, 0.0))
        for (i, j), c in logical.quadratic.items():
            if i == v or j == v:
                total += abs(c)
        worst = max(worst, total)
    return 1.0 + worst


@dataclass
class EmbeddedQubo:
    """A logical objective realized on a lattice through an embedding.

    `physical` ranges over the active lattice vertices only; `vertex_order`
    maps its variable positions back to canonical lattice indices.
    """

    physical: Qubo
    embedding: MinorEmbedding
    logical: Qubo
    vertex_order: list[int]
    placement: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)

    @cached_property
    def position_of(self) -> dict[int, int]:
        return {p: k for k, p in enumerate(self.vertex_order)}

    def lift(self, logical_assignment: Sequence[int]) -> tuple[int, ...]:
        """Chain-aligned physical assignment for a logical one."""
        self.logical.check_assignment(logical_assignment)
        fill = 0 if self.physical.domain == BINARY else -1
        out = [fill] * len(self.vertex_order)
        for v, chain in self.embedding.chains.items():
            for p in chain:
                out[self.position_of[p]] = int(logical_assignment[v])
        return tuple(out)

    def chain_intact_qubo(self) -> Qubo:
        """Exact restriction of the physical objective to aligned chains.

        Substituting every chain member by its logical variable gives a
        logical-space objective whose energies agree with the physical one on
        all chain-intact states.
        """
        owners: dict[int, int] = {}
        for v, chain in self.embedding.chains.items():
            for p in chain:
                owners[self.position_of[p]] = v
        out = Qubo(
            self.physical.domain,
            self.logical.num_vars,
            self.physical.offset,
            var_names=list(self.logical.var_names) if self.logical.var_names else None,
        )
        for k, c in self.physical.linear.items():
            out.add_linear(owners[k], c)
        for (k1, k2), c in self.physical.quadratic.items():
            v1, v2 = owners[k1], owners[k2]
            if v1 == v2:
                # intra-chain coupler: x*x = x (binary) or s*s = 1 (spin)
                if self.physical.domain == BINARY:
                    out.add_linear(v1, c)
                else:
                    out.add_offset(c)
            else:
                out.add_quadratic(v1, v2, c)
        return out


def embed_qubo(logical: Qubo, emb: MinorEmbedding) -> EmbeddedQubo:
    """Translate a logical objective into a physical lattice objective.

    Linear terms split equally across chain members; each quadratic term is
    placed on the lexicographically smallest available lattice edge between
    the two chains; chain alignment is enforced along a spanning tree of each
    chain with the paper-form penalty of weight alpha (counted over ordered
    pairs, so a broken tree edge costs 2 * alpha).
    """
    graph = emb.graph
    report = validate(emb, logical.interaction_edges(), range(logical.num_vars))
    if not report.ok:
        raise EmbeddingError(f"embedding invalid: {report.summary()}")

    order = emb.physical_vertices()
    pos = {p: k for k, p in enumerate(order)}
    physical = Qubo(
        logical.domain,
        len(order),
        logical.offset,
        var_names=[str(p) for p in order],
    )
    for v, c in logical.linear.items():
        chain = emb.chains[v]
        share = c / len(chain)
        for p in chain:
            physical.add_linear(pos[p], share)

    placement: dict[tuple[int, int], tuple[int, int]] = {}
    for (u, v), c in sorted(logical.quadratic.items()):
        pairs = sorted(
            tuple(sorted((p, q)))
            for p in emb.chains[u]
            for q in emb.chains[v]
            if graph.has_edge(p, q)
        )
        if not pairs:
            raise EmbeddingError(f"no physical edge available for logical edge ({u}, {v})")
        p, q = pairs[0]
        physical.add_quadratic(pos[p], pos[q], c)
        placement[(u, v)] = (p, q)

    alpha = emb.alpha
    for v, chain in emb.chains.items():
        for p, q in _spanning_tree_edges(graph, chain):
            kp, kq = pos[p], pos[q]
            if logical.domain == BINARY:
                # ordered-pair sum of x_i(1-x_j) + x_j(1-x_i)
                physical.add_linear(kp, 2.0 * alpha)
                physical.add_linear(kq, 2.0 * alpha)
                physical.add_quadratic(kp, kq, -4.0 * alpha)
            else:
                physical.add_offset(alpha)
                physical.add_quadratic(kp, kq, -alpha)
    return EmbeddedQubo(physical, emb, logical, order, placement)


def _spanning_tree_edges(
    graph: LatticeGraph, chain: frozenset[int]
) -> list[tuple[int, int]]:
    start = min(chain)
    seen = {start}
    frontier = [start]
    edges: list[tuple[int, int]] = []
    while frontier:
        u = frontier.pop()
        for w in sorted(graph.neighbors(u)):
            if w in chain and w not in seen:
                seen.add(w)
                edges.append((u, w))
                frontier.append(w)
    if seen != chain:
        raise EmbeddingError(f"chain {sorted(chain)} is not connected")
    return edges


def unembed(
    e: EmbeddedQubo, physical_assignment: Sequence[int]
) -> tuple[tuple[int, ...], int]:
    """Majority-vote chain decoding.

    Exact ties break toward 0 (spin -1); the second result counts chains whose
    members disagreed.
    """
    e.physical.check_assignment(physical_assignment)
    low = 0 if e.physical.domain == BINARY else -1
    high = 1
    logical = [low] * e.logical.num_vars
    broken = 0
    for v, chain in e.embedding.chains.items():
        values = [physical_assignment[e.position_of[p]] for p in chain]
        ups = sum(1 for x in values if x == high)
        downs = len(values) - ups
        logical[v] = high if ups > downs else low
        if 0 < ups < len(values):
            broken += 1
    return tuple(logical), broken


def embedding_to_doc(emb: MinorEmbedding, logical_names: Sequence[str] | None = None) -> dict:
    J = detect_chimera(emb.lattice)
    hint = ("chimera", J) if J is not None and emb.lattice.width == emb.lattice.height else None
    chains = {}
    for v, chain in emb.chains.items():
        name = logical_names[v] if logical_names is not None else str(v)
        chains[name] = sorted(chain)
    return {
        "lattice": lattice_to_doc(emb.lattice, hint),
        "alpha": emb.alpha,
        "chains": chains,
    }


def embedding_from_doc(doc: Mapping, logical_names: Sequence[str] | None = None) -> MinorEmbedding:
    spec = lattice_from_doc(doc["lattice"])
    name_to_index: dict[str, int] | None = None
    if logical_names is not None:
        name_to_index = {n: i for i, n in enumerate(logical_names)}
    chains: dict[int, frozenset[int]] = {}
    for name, members in doc["chains"].items():
        if name_to_index is not None:
            idx = name_to_index[name]
        else:
            idx = int(name)
        chains[idx] = frozenset(int(p) for p in members)
    return MinorEmbedding(spec, chains, float(doc.get("alpha", 1.0)))
