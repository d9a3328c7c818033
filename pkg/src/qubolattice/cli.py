"""Command-line pipelines over the serialized document formats.

Subcommands compose through files: `build` turns an instance document into a
logical objective, `embed` lays it onto a lattice, `solve` runs a solver and
decodes, `validate` and `gap` verify, and `predict` prints the closed-form
size estimates.  Identical inputs and seeds produce byte-identical outputs.
Exit codes: 0 success, 1 infeasible or invalid, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from . import documents
from .cartoon import lz_time, min_gap
from .coloring import ColoringInstance, build_tileset, compile_coloring, verify_gap
from .embedding import (
    EmbeddedQubo,
    MinorEmbedding,
    choose_alpha,
    embed_complete_chimera,
    embed_qubo,
    embedding_from_doc,
    embedding_to_doc,
    unembed,
    validate,
)
from .hamcycle import (
    HamcycleInstance,
    build_ic_qubo,
    build_tileable_hamcycle,
    decode_cycle,
    embed_tileable_hamcycle,
    predicted_hamcycle_length,
    predicted_permutation_length,
)
from .adder import build_adder
from .knapsack import KnapsackInstance, build_knapsack_qubo, predicted_knapsack_length
from .lattice import build_lattice, chimera_spec, lattice_from_doc, lattice_to_doc
from .numpart import (
    PartitionInstance,
    build_numpart_qubo,
    decode_partition,
    embed_numpart,
    predicted_numpart_length,
)
from .qubo import (
    BINARY,
    NoiseModel,
    Qubo,
    anneal_solve,
    apply_noise,
    brute_force,
    normalize_couplings,
    qubo_from_doc,
    qubo_to_doc,
    to_spin,
)
from .unary import build_unary_qubo, fractal_embed_unary, predicted_unary_length


class UsageError(Exception):
    pass


def _read_doc(path: str):
    try:
        with open(path) as fh:
            return documents.loads(fh.read())
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err}") from None


def _emit(doc, out: str | None) -> None:
    text = documents.dumps(doc)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_lattice(spec_text: str):
    if spec_text.startswith("chimera:"):
        try:
            j, l = (int(x) for x in spec_text.split(":", 1)[1].split(","))
        except ValueError:
            raise UsageError("expected --lattice chimera:J,L") from None
        return chimera_spec(j, l), ("chimera", j)
    doc = _read_doc(spec_text)
    return lattice_from_doc(doc), None


def cmd_lattice(args) -> int:
    spec, hint = _parse_lattice(args.lattice)
    graph = build_lattice(spec)
    _emit(
        {
            "lattice": lattice_to_doc(spec, hint),
            "vertices": graph.num_vertices,
            "edges": graph.num_edges,
        },
        args.out,
    )
    return 0


def _logical_for(inst, strategy: str, l_star: int | None):
    meta: dict = {}
    if isinstance(inst, PartitionInstance):
        tree = build_numpart_qubo(inst)
        meta["feasible_parity"] = tree.feasible_parity
        return tree.qubo, meta
    if isinstance(inst, KnapsackInstance):
        if l_star is None:
            l_star = max(0, sum(inst.values).bit_length() - 1)
        meta["l_star"] = l_star
        return build_knapsack_qubo(inst, l_star).qubo, meta
    if isinstance(inst, ColoringInstance):
        q = Qubo(BINARY, inst.n * inst.q)
        q.var_names = [f"x:{v}:{c}" for v in range(inst.n) for c in range(inst.q)]
        for v in range(inst.n):
            q.add_squared_affine(
                1.0, [(v * inst.q + c, -1.0) for c in range(inst.q)]
            )
        for u, v in inst.edges:
            for c in range(inst.q):
                q.add_quadratic(u * inst.q + c, v * inst.q + c, 1.0)
        return q, meta
    if isinstance(inst, HamcycleInstance):
        if strategy == "tiles":
            return build_tileable_hamcycle(inst).qubo, meta
        return build_ic_qubo(inst).qubo, meta
    if isinstance(inst, dict) and inst.get("kind") == "unary":
        return build_unary_qubo(inst["n"], inst["allow_zero"]).qubo, meta
    if isinstance(inst, dict) and inst.get("kind") == "adder":
        return build_adder(inst["n"]).qubo, meta
    raise UsageError("unsupported instance type")


def cmd_build(args) -> int:
    inst = documents.parse_instance(_read_doc(args.instance))
    logical, meta = _logical_for(inst, args.strategy, args.l_star)
    doc = {
        "instance": documents.instance_to_doc(inst),
        "qubo": qubo_to_doc(logical),
        "meta": meta,
        "seed": args.seed,
    }
    _emit(doc, args.out)
    if isinstance(inst, PartitionInstance) and not meta.get("feasible_parity", True):
        return 1
    return 0


def _embedded_for(inst, strategy: str, J: int) -> EmbeddedQubo:
    if isinstance(inst, PartitionInstance) and strategy == "tree":
        return embed_numpart(inst, J)
    if isinstance(inst, dict) and inst.get("kind") == "unary" and strategy == "tree":
        embedded, _ = fractal_embed_unary(inst["n"], J)
        return embedded
    if isinstance(inst, ColoringInstance) and strategy == "tiles":
        return compile_coloring(inst)
    if isinstance(inst, HamcycleInstance) and strategy == "tiles":
        return embed_tileable_hamcycle(inst, J)
    # fall back to the complete-graph embedding of the logical interactions
    logical, _ = _logical_for(inst, strategy, None)
    emb = embed_complete_chimera(logical.num_vars, J)
    emb.alpha = choose_alpha(logical)
    return embed_qubo(logical, emb)


def cmd_embed(args) -> int:
    inst = documents.parse_instance(_read_doc(args.instance))
    J = 4
    if args.lattice:
        spec, hint = _parse_lattice(args.lattice)
        from .lattice import detect_chimera

        J = detect_chimera(spec) or 4
    embedded = _embedded_for(inst, args.strategy, J)
    physical = embedded.physical
    scale = 1.0
    if physical.domain == BINARY:
        physical = to_spin(physical)
    if args.normalize:
        physical, scale = normalize_couplings(physical)
    if args.noise is not None:
        physical = apply_noise(physical, NoiseModel(args.noise, args.seed))
    doc = {
        "instance": documents.instance_to_doc(inst),
        "strategy": args.strategy,
        "embedding": embedding_to_doc(
            embedded.embedding,
            [embedded.logical.name_of(i) for i in range(embedded.logical.num_vars)],
        ),
        "logical_qubo": qubo_to_doc(embedded.logical),
        "physical_qubo": qubo_to_doc(embedded.physical),
        "solver_qubo": qubo_to_doc(physical),
        "scale": scale,
        "vertex_order": list(embedded.vertex_order),
        "seed": args.seed,
    }
    _emit(doc, args.out)
    return 0


def _rebuild_embedded(doc) -> EmbeddedQubo:
    logical = qubo_from_doc(doc["logical_qubo"])
    physical = qubo_from_doc(doc["physical_qubo"])
    emb = embedding_from_doc(
        doc["embedding"], [logical.name_of(i) for i in range(logical.num_vars)]
    )
    return EmbeddedQubo(physical, emb, logical, [int(v) for v in doc["vertex_order"]])


def cmd_solve(args) -> int:
    doc = _read_doc(args.input)
    inst = documents.parse_instance(doc["instance"]) if "instance" in doc else None
    if "physical_qubo" in doc:
        embedded = _rebuild_embedded(doc)
        target = embedded.physical
    else:
        embedded = None
        target = qubo_from_doc(doc["qubo"])
    if args.solver == "brute":
        spec = brute_force(target, cap=args.cap)
        best, energy = spec.ground_states[0], spec.ground_energy
    else:
        best, energy = anneal_solve(
            target, sweeps=args.sweeps, restarts=args.restarts, seed=args.seed
        )
    result = {"energy": energy, "seed": args.seed, "solver": args.solver}
    logical_state = best
    if embedded is not None:
        logical_state, broken = unembed(embedded, best)
        result["broken_chains"] = broken
        if embedded.logical.domain == "spin":
            logical_state = tuple((s + 1) // 2 for s in logical_state)
    result["logical"] = list(logical_state)
    feasible = abs(energy) <= 1e-6
    if isinstance(inst, PartitionInstance):
        tree = build_numpart_qubo(inst)
        if embedded is None and tree.feasible_parity:
            result["decoded"] = decode_partition(tree, logical_state)
            feasible = result["decoded"]["balanced"]
    if isinstance(inst, HamcycleInstance):
        result["decoded"] = decode_cycle(logical_state, inst)
        feasible = result["decoded"]["ok"]
    result["feasible"] = feasible
    _emit(result, args.out)
    return 0 if feasible else 1


def cmd_validate(args) -> int:
    doc = _read_doc(args.input)
    embedded = _rebuild_embedded(doc)
    report = validate(
        embedded.embedding,
        embedded.logical.interaction_edges(),
        range(embedded.logical.num_vars),
    )
    _emit({"valid": report.ok, "violations": report.violations}, args.out)
    return 0 if report.ok else 1


def cmd_gap(args) -> int:
    if args.assembly:
        tileset = build_tileset(args.q)
        spec = verify_gap(tileset, args.assembly)
    else:
        doc = _read_doc(args.input)
        q = qubo_from_doc(doc["qubo"] if "qubo" in doc else doc)
        spec = brute_force(q, cap=args.cap)
    _emit(
        {
            "ground_energy": spec.ground_energy,
            "gap": spec.gap,
            "ground_states": spec.state_count_at_ground,
            "degenerate": spec.degenerate,
        },
        args.out,
    )
    return 0


def cmd_predict(args) -> int:
    family = args.family
    vals = args.values
    try:
        if family == "unary":
            out = predicted_unary_length(int(vals[0]), int(vals[1]), args.optimized)
        elif family == "numpart":
            out = predicted_numpart_length(
                int(vals[0]), int(vals[1]), int(vals[2]), args.strategy or "tree"
            )
        elif family == "knapsack":
            out = predicted_knapsack_length(
                int(vals[0]), int(vals[1]), int(vals[2]), int(vals[3])
            )
        elif family == "hamcycle":
            out = predicted_hamcycle_length(
                int(vals[0]), int(vals[1]), args.strategy or "tileable"
            )
        elif family == "permutation":
            out = predicted_permutation_length(int(vals[0]), args.strategy or "tree")
        elif family == "cartoon":
            n = int(vals[0])
            gap, s_star = min_gap(n)
            _emit(
                {
                    "N": n,
                    "gap": gap,
                    "s_star": s_star,
                    "tau_linear": lz_time(n, "linear"),
                    "tau_optimal": lz_time(n, "optimal"),
                },
                args.out,
            )
            return 0
        else:
            raise UsageError(f"unknown prediction family {family!r}")
    except IndexError:
        raise UsageError(f"missing arguments for predict {family}") from None
    _emit({"family": family, "predicted_side": out}, args.out)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubolattice",
        description="compile, embed, solve, and verify lattice QUBOs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", help="emit a lattice document with its counts")
    p.add_argument("--lattice", required=True, help="chimera:J,L or a lattice document path")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_lattice)

    p = sub.add_parser("build", help="compile an instance document to a QUBO")
    p.add_argument("instance")
    p.add_argument("--strategy", choices=["tree", "complete", "tiles"], default="tree")
    p.add_argument("--l-star", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("embed", help="embed an instance on a lattice")
    p.add_argument("instance")
    p.add_argument("--strategy", choices=["tree", "complete", "tiles"], default="tree")
    p.add_argument("--lattice", default=None)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--noise", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("solve", help="solve a built or embedded document")
    p.add_argument("input")
    p.add_argument("--solver", choices=["brute", "anneal"], default="brute")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweeps", type=int, default=1500)
    p.add_argument("--restarts", type=int, default=12)
    p.add_argument("--cap", type=int, default=28)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("validate", help="check an embedding document")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("gap", help="exact spectrum of a QUBO or tile assembly")
    p.add_argument("input", nargs="?")
    p.add_argument("--assembly", choices=["1-tile", "2-tile-hor", "2-tile-vert", "chain"])
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--cap", type=int, default=28)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gap)

    p = sub.add_parser("predict", help="closed-form embedding-size estimates")
    p.add_argument("family", choices=["unary", "numpart", "knapsack", "hamcycle", "permutation", "cartoon"])
    p.add_argument("values", nargs="*")
    p.add_argument("--strategy")
    p.add_argument("--optimized", action="store_true")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_predict)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    try:
        return args.fn(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except documents.DocumentError as err:
        print(f"document error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
