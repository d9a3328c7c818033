"""Number partitioning compiled as a tree of constant-coupling adders.

The direct spin form (sum n_i s_i)^2 needs couplings as large as 2^(2M) and an
all-to-all graph.  Summing the numbers pairwise instead, with each addition
encoded by the column adder, keeps every coefficient O(1): leaf adders gate
fixed integers behind selector bits, internal nodes add the two child
registers, and the root register is pinned to the half-sum target W.  The
whole tree then lays out on a lattice like the fractal unary constraint, with
corridors widened to carry multi-bit registers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ._layout import SlotPlanner, place_clique_block
from .adder import read_register
from .embedding import EmbeddedQubo, MinorEmbedding, choose_alpha, embed_qubo
from .qubo import BINARY, Qubo, QuboBuilder


class PartitionError(ValueError):
    """Invalid partition instance."""


@dataclass(frozen=True)
class PartitionInstance:
    """A multiset of positive integers to split into two equal-sum halves."""

    numbers: tuple[int, ...]

    def __post_init__(self):
        if len(self.numbers) < 2:
            raise PartitionError("partition needs at least two numbers")
        if any(n < 1 for n in self.numbers):
            raise PartitionError("numbers must be positive integers")

    @property
    def N(self) -> int:
        return len(self.numbers)

    @property
    def M(self) -> int:
        return max(n.bit_length() for n in self.numbers)

    @property
    def total(self) -> int:
        return sum(self.numbers)

    @property
    def balanced_target(self) -> float:
        return self.total / 2.0

    @property
    def feasible_parity(self) -> bool:
        return self.total % 2 == 0


@dataclass
class _TreeNode:
    key: tuple[int, int]
    prefix: str
    width: int
    children: tuple["_TreeNode", "_TreeNode"] | None
    selectors: tuple[str, ...] = ()
    constants: tuple[int, ...] = ()


@dataclass
class SummationTreeQubo:
    """Pairwise-summation tree objective with its variable-role map."""

    qubo: Qubo
    instance: PartitionInstance
    selectors: list[str]
    root: _TreeNode | None
    levels: int
    feasible_parity: bool
    roles: dict[str, int] = field(default_factory=dict)

    def nodes(self) -> list[_TreeNode]:
        out: list[_TreeNode] = []

        def walk(node: _TreeNode | None):
            if node is None:
                return
            out.append(node)
            if node.children:
                walk(node.children[0])
                walk(node.children[1])

        walk(self.root)
        return out


def build_numpart_qubo(inst: PartitionInstance) -> SummationTreeQubo:
    """Compile a partition instance to a tree-of-adders QUBO.

    Zero ground energy iff some subset of the numbers sums to W = total / 2;
    selector bits x_i mark the subset.  An odd total cannot balance; the
    compiler then returns a flagged marker objective with constant energy 1.
    """
    N = inst.N
    m = max(1, math.ceil(math.log2(N)))
    builder = QuboBuilder(BINARY)
    selectors = [f"x{i}" for i in range(1, N + 1)]
    for s in selectors:
        builder.var(s)
    if not inst.feasible_parity:
        builder.add_offset(1.0)
        q = builder.build()
        return SummationTreeQubo(
            q, inst, selectors, None, m, False, {q.name_of(i): i for i in range(q.num_vars)}
        )

    M = inst.M

    def build_node(level: int, k: int) -> _TreeNode | None:
        if level == m - 1:
            i1, i2 = 2 * k - 1, 2 * k
            present = [i for i in (i1, i2) if i <= N]
            if not present:
                return None
            prefix = f"X{level}.{k}"
            width = M + 1
            sels = tuple(f"x{i}" for i in present)
            consts = tuple(inst.numbers[i - 1] for i in present)
            _add_selectable_columns(builder, prefix, width, list(zip(sels, consts)))
            return _TreeNode((level, k), prefix, width, None, sels, consts)
        left = build_node(level + 1, 2 * k - 1)
        right = build_node(level + 1, 2 * k)
        if right is None:
            return left
        prefix = f"X{level}.{k}"
        width = max(left.width, right.width) + 1
        _add_adder_columns(builder, prefix, width, left, right)
        return _TreeNode((level, k), prefix, width, (left, right))

    root = build_node(0, 1)
    assert root is not None
    W = inst.total // 2
    for p in range(root.width):
        bit = (W >> p) & 1
        # (bit - X_p)^2 folds to a linear pin on the register bit
        builder.add_squared_affine(float(bit), [(f"{root.prefix}:{p}", -1.0)])
    q = builder.build()
    roles = {q.name_of(i): i for i in range(q.num_vars)}
    return SummationTreeQubo(q, inst, selectors, root, m, True, roles)


def _add_selectable_columns(
    builder: QuboBuilder, prefix: str, width: int, gated: list[tuple[str, int]]
) -> None:
    M = width - 1
    for j in range(M):
        terms: list[tuple[str, float]] = [(f"{prefix}:{j}", 1.0)]
        if j == M - 1:
            terms.append((f"{prefix}:{M}", 2.0))
        else:
            terms.append((f"Z{prefix}:{j + 1}", 2.0))
        if j > 0:
            terms.append((f"Z{prefix}:{j}", -1.0))
        for sel, const in gated:
            if (const >> j) & 1:
                terms.append((sel, -1.0))
        builder.add_squared_affine(0.0, terms)


def _add_adder_columns(
    builder: QuboBuilder, prefix: str, width: int, left: _TreeNode, right: _TreeNode
) -> None:
    n_in = width - 1
    for j in range(n_in):
        terms: list[tuple[str, float]] = [(f"{prefix}:{j}", 1.0)]
        if j == n_in - 1:
            terms.append((f"{prefix}:{n_in}", 2.0))
        else:
            terms.append((f"Z{prefix}:{j + 1}", 2.0))
        if j > 0:
            terms.append((f"Z{prefix}:{j}", -1.0))
        if j < left.width:
            terms.append((f"{left.prefix}:{j}", -1.0))
        if j < right.width:
            terms.append((f"{right.prefix}:{j}", -1.0))
        builder.add_squared_affine(0.0, terms)


def predicted_numpart_length(N: int, M: int, J: int, strategy: str = "tree") -> float:
    """Closed-form side-length bounds: treelike vs flat pairwise summation."""
    if strategy == "tree":
        return (12.0 * M + 40.0) / J * math.sqrt(N)
    if strategy == "linear":
        return 7.0 * N * M / J
    raise PartitionError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# layout


def _node_vars(tree: SummationTreeQubo, node: _TreeNode) -> list[str]:
    """Clique content of one node block: outputs, carries, inputs, selectors."""
    names: list[str] = []
    names.extend(f"{node.prefix}:{p}" for p in range(node.width))
    names.extend(
        f"Z{node.prefix}:{p}" for p in range(1, node.width - 1) if f"Z{node.prefix}:{p}" in tree.roles
    )
    if node.children:
        for child in node.children:
            names.extend(f"{child.prefix}:{p}" for p in range(child.width))
    else:
        names.extend(node.selectors)
    return names


def _layout_node(
    planner: SlotPlanner, tree: SummationTreeQubo, node: _TreeNode, origin: tuple[int, int], level: int
) -> tuple[int, int, tuple[int, int], dict[str, tuple[int, int, int]]]:
    """Place the subtree rooted at node; return (width, height, block origin,
    register pads).

    Pads map each output-register bit to its (col, row, track) arm end on the
    subtree bounding box edge: the bottom edge when this level composes
    vertically (even levels), the right edge otherwise.
    """
    J = planner.J
    oi, oj = origin
    names = _node_vars(tree, node)
    vertical = level % 2 == 0
    if node.children is None:
        b = place_clique_block(planner, origin, names)
        pads = {}
        exit_down = level % 2 == 1  # the level above composes vertically
        for p in range(node.width):
            name = f"{node.prefix}:{p}"
            lp = names.index(name)
            row, track = divmod(lp, J)
            if exit_down:
                pads[name] = (oi + row, oj + b - 1, track)
            else:
                pads[name] = (oi + b - 1, oj + row, track)
        return b, b, origin, pads

    left, right = node.children
    if vertical:
        # children side by side, parent block below and to the right so the
        # child exit lanes and the parent arm extensions never share a column
        w1, h1, _, pads1 = _layout_node(planner, tree, left, (oi, oj), level + 1)
        w2, h2, _, pads2 = _layout_node(planner, tree, right, (oi + w1, oj), level + 1)
        block_i = oi + w1 + w2
        block_j = oj + max(h1, h2)
        b = place_clique_block(planner, (block_i, block_j), names)
        for child, pads in ((left, pads1), (right, pads2)):
            for p in range(child.width):
                name = f"{child.prefix}:{p}"
                col, row, track = pads[name]
                lp = names.index(name)
                drow, dtrack = divmod(lp, J)
                arm_row = block_j + drow
                planner.run_vertical(name, track, col, row + 1, arm_row)
                planner.run_horizontal(name, dtrack, arm_row, col, block_i - 1)
        width = w1 + w2 + b
        height = block_j + b - oj
        out_pads = {}
        for p in range(node.width):
            name = f"{node.prefix}:{p}"
            row, track = divmod(names.index(name), J)
            out_pads[name] = (oi + width - 1, block_j + row, track)
        return width, height, (block_i, block_j), out_pads

    # children stacked, parent block right and below
    w1, h1, _, pads1 = _layout_node(planner, tree, left, (oi, oj), level + 1)
    w2, h2, _, pads2 = _layout_node(planner, tree, right, (oi, oj + h1), level + 1)
    block_i = oi + max(w1, w2)
    block_j = oj + h1 + h2
    b = place_clique_block(planner, (block_i, block_j), names)
    for child, pads in ((left, pads1), (right, pads2)):
        for p in range(child.width):
            name = f"{child.prefix}:{p}"
            col, row, track = pads[name]
            lp = names.index(name)
            drow, dtrack = divmod(lp, J)
            arm_col = block_i + drow
            planner.run_horizontal(name, track, row, col + 1, arm_col)
            planner.run_vertical(name, dtrack, arm_col, row, block_j - 1)
    height = h1 + h2 + b
    width = block_i + b - oi
    out_pads = {}
    for p in range(node.width):
        name = f"{node.prefix}:{p}"
        row, track = divmod(names.index(name), J)
        out_pads[name] = (block_i + row, oj + height - 1, track)
    return width, height, (block_i, block_j), out_pads


def embed_numpart(inst: PartitionInstance, J: int = 4) -> EmbeddedQubo:
    """Fractal-style embedding of the summation tree with register corridors.

    Each tree node becomes a clique block; child output registers travel to
    their parent block through corridor jogs sized ceil(width / J).  Split
    directions alternate per level so the realized side stays within the
    (12M + 40) sqrt(N) / J budget.
    """
    if J < 2:
        raise PartitionError("register corridors need J >= 2")
    tree = build_numpart_qubo(inst)
    if not tree.feasible_parity:
        raise PartitionError("odd total has no balanced partition; nothing to embed")
    planner = SlotPlanner(J)
    assert tree.root is not None
    _layout_node(planner, tree, tree.root, (0, 0), 0)
    emb = planner.to_embedding(tree.qubo, choose_alpha(tree.qubo))
    return embed_qubo(tree.qubo, emb)


# ---------------------------------------------------------------------------
# decoding


def decode_partition(
    tree: SummationTreeQubo, assignment, broken_chains: int = 0
) -> dict:
    """Split the numbers per the selector bits and report the imbalance."""
    inst = tree.instance
    set_a, set_b = [], []
    for i, name in enumerate(tree.selectors, start=1):
        value = assignment[tree.roles[name]]
        (set_a if value == 1 else set_b).append(inst.numbers[i - 1])
    residual = abs(sum(set_a) - sum(set_b))
    return {
        "set_a": set_a,
        "set_b": set_b,
        "residual": residual,
        "balanced": residual == 0,
        "broken_chains": broken_chains,
    }


def root_register_value(tree: SummationTreeQubo, assignment) -> int:
    assert tree.root is not None
    return read_register(assignment, tree.roles, tree.root.prefix, tree.root.width)


def arithmetic_completion(
    tree: SummationTreeQubo, selector_values: dict[str, int]
) -> tuple[int, ...]:
    """The unique zero-column-penalty completion of a selector assignment.

    Registers carry the exact partial sums and carries follow the grade-school
    algorithm, so every column constraint evaluates to zero; only the root
    pins can then contribute energy.  The objective is a sum of squares, so
    its ground energy is zero exactly when some completion evaluates to zero.
    """
    assert tree.root is not None
    values: dict[str, int] = {}
    for name in tree.selectors:
        values[name] = int(selector_values[name])

    def fill(node: _TreeNode) -> int:
        if node.children is None:
            total = sum(
                const * values[sel] for sel, const in zip(node.selectors, node.constants)
            )
            in_bits = lambda j: sum(
                ((const >> j) & 1) * values[sel]
                for sel, const in zip(node.selectors, node.constants)
            )
        else:
            a = fill(node.children[0])
            b = fill(node.children[1])
            total = a + b
            in_bits = lambda j: ((a >> j) & 1) + ((b >> j) & 1)
        carry = 0
        for j in range(node.width - 1):
            out_bit = (total >> j) & 1
            values[f"{node.prefix}:{j}"] = out_bit
            carry = (in_bits(j) + carry - out_bit) // 2
            if j + 1 < node.width - 1:
                values[f"Z{node.prefix}:{j + 1}"] = carry
        values[f"{node.prefix}:{node.width - 1}"] = carry
        return total

    fill(tree.root)
    return tuple(values[tree.qubo.name_of(i)] for i in range(tree.qubo.num_vars))


def ground_energy_by_completion(tree: SummationTreeQubo) -> tuple[float, tuple[int, ...] | None]:
    """Zero-or-positive ground check by sweeping selector completions.

    Returns (0.0, state) with a witness when a balanced subset exists; else
    (minimum completion energy, None), which is positive.
    """
    if not tree.feasible_parity:
        return tree.qubo.offset, None
    best = math.inf
    witness = None
    n = len(tree.selectors)
    for code in range(1 << n):
        fixed = {name: (code >> k) & 1 for k, name in enumerate(tree.selectors)}
        state = arithmetic_completion(tree, fixed)
        e = tree.qubo.energy(state)
        if e < best:
            best, witness = e, state
        if best == 0.0:
            break
    return best, (witness if best == 0.0 else None)
