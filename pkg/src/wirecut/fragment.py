"""Wire-cut fragmentation: applying a partition to a circuit.

A bipartition of the gate graph induces cut points on qubit wires: one cut
per wire segment whose endpoint gates land on different sides. Cutting
splits every wire into pieces; each piece becomes a fresh local qubit of
the fragment owning its gates, carrying an initialization role (in-cut)
when the piece starts at a cut and a measurement role (out-cut) when it
ends at one. A piece is always owned by one side because every crossing
adjacency is cut, so fragments stay straight-line circuits.

Variant enumeration synthesizes the runnable circuits: each out-cut is
measured in the Z, X, or Y basis (basis change appended at the end of the
wire), and each in-cut is prepared in one of |0>, |1>, |+>, |+i>
(preparation prepended), for 3^out * 4^in variants per fragment.

The recursive driver keeps splitting any fragment whose estimated success
probability falls below the threshold, choosing per split the cheaper of
the genetic search and the annealer (both rescored with the exact cut
cost), and stops at the depth/cut-count limits.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .circuit import Circuit, Gate, circuit_from_dict, circuit_to_dict
from .graph import GateGraph, build_graph
from .ising import AnnealSchedule, build_ising, default_schedule, simulated_anneal, spins_to_partition
from .noise import NoiseProfile, success_probability
from .partition import GaParams, cut_size, find_min_cut_ga, partition_cost

__all__ = [
    "PlanError",
    "CutPoint",
    "CutSpec",
    "Fragment",
    "VariantRun",
    "PlanNode",
    "FragmentPlan",
    "Limits",
    "derive_cut_points",
    "fragment",
    "enumerate_variants",
    "recursive_fragment",
    "anneal_min_cut",
    "single_cut_plan",
    "plan_to_dict",
    "plan_from_dict",
]

INIT_STATES = ("zero", "one", "plus", "plus_i")
MEAS_BASES = ("Z", "X", "Y")

_PREP_GATES = {
    "zero": (),
    "one": ("x",),
    "plus": ("h",),
    "plus_i": ("h", "s"),
}
_BASIS_GATES = {
    "Z": (),
    "X": ("h",),
    "Y": ("sdg", "h"),
}


class PlanError(ValueError):
    """Raised on inconsistent cut specifications or plan documents."""


@dataclass(frozen=True)
class CutPoint:
    """A wire cut on ``qubit`` immediately after ``upstream_gate``."""

    qubit: int
    upstream_gate: int
    downstream_gate: int
    cut_id: int


@dataclass(frozen=True)
class CutSpec:
    cuts: tuple[CutPoint, ...]

    @property
    def k(self) -> int:
        return len(self.cuts)


@dataclass
class Fragment:
    """A sub-circuit over compacted local qubits.

    in_cuts / out_cuts map cut ids to local qubits; qubit_map maps local
    qubits back to the original circuit's qubit indices (several locals
    may share an original when a wire is cut more than once; the one
    without an out-cut role carries the wire's final value).
    """

    id: int
    circuit: Circuit
    in_cuts: dict[int, int] = field(default_factory=dict)
    out_cuts: dict[int, int] = field(default_factory=dict)
    qubit_map: tuple[int, ...] = ()

    @property
    def width(self) -> int:
        return self.circuit.width

    def terminal_qubits(self) -> list[int]:
        """Local qubits whose value survives to the final distribution."""
        cut_outs = set(self.out_cuts.values())
        return [q for q in range(self.width) if q not in cut_outs]


@dataclass
class VariantRun:
    fragment_id: int
    bases: dict[int, str]
    inits: dict[int, str]
    circuit: Circuit

    @property
    def key(self) -> str:
        parts = [f"m{cid}:{self.bases[cid]}" for cid in sorted(self.bases)]
        parts += [f"i{cid}:{self.inits[cid]}" for cid in sorted(self.inits)]
        return ";".join(parts) if parts else "base"


def variant_key(bases: dict[int, str], inits: dict[int, str]) -> str:
    parts = [f"m{cid}:{bases[cid]}" for cid in sorted(bases)]
    parts += [f"i{cid}:{inits[cid]}" for cid in sorted(inits)]
    return ";".join(parts) if parts else "base"


# ---------------------------------------------------------------------------
# Cut derivation and fragment construction
# ---------------------------------------------------------------------------

def derive_cut_points(pv, g: GateGraph, c: Circuit, first_id: int = 0) -> CutSpec:
    """Cuts induced by a partition: one per crossing wire segment.

    The total equals the weighted cut size (a weight-2 edge yields two
    cuts). Cut ids are assigned in (qubit, position) order from
    ``first_id``.
    """
    if len(pv) != g.n:
        raise PlanError(f"partition length {len(pv)} != vertex count {g.n}")
    if len(set(pv)) == 1 and g.n > 0:
        raise PlanError("partition is one-sided; no cut to derive")
    crossing = []
    for e in g.edges:
        if pv[e.u] != pv[e.v]:
            crossing.extend(e.segments)
    crossing.sort(key=lambda s: (s.qubit, s.upstream_gate))
    cuts = tuple(
        CutPoint(s.qubit, s.upstream_gate, s.downstream_gate, first_id + i)
        for i, s in enumerate(crossing)
    )
    return CutSpec(cuts=cuts)


def _as_root_fragment(c: Circuit) -> Fragment:
    return Fragment(id=0, circuit=c, qubit_map=tuple(range(c.width)))


def _split_fragment(
    parent: Fragment,
    spec: CutSpec,
    pv,
    child_ids: tuple[int, int],
) -> tuple[Fragment, Fragment]:
    c = parent.circuit
    width = c.width
    cuts_after = {(cp.qubit, cp.upstream_gate): cp.cut_id for cp in spec.cuts}
    if len(cuts_after) != len(spec.cuts):
        raise PlanError("duplicate cut position in cut spec")
    vertex_of_gate = {gi: vid for vid, gi in enumerate(c.two_qubit_indices())}

    # walk once: which piece of which wire each gate touches, and the piece
    # index right after each two-qubit gate (for cut role placement)
    cur = [0] * width
    placements: list[list[tuple[int, int]]] = []
    piece_side: dict[tuple[int, int], int] = {}
    piece_of_gate: dict[tuple[int, int], int] = {}
    for gi, gate in enumerate(c.gates):
        spots = [(q, cur[q]) for q in gate.qubits]
        placements.append(spots)
        if gate.is_two_qubit and not gate.is_measurement:
            side = pv[vertex_of_gate[gi]]
            for spot in spots:
                if piece_side.setdefault(spot, side) != side:
                    raise PlanError("cut spec splits a wire piece across sides")
            for q in gate.qubits:
                piece_of_gate[(q, gi)] = cur[q]
                if (q, gi) in cuts_after:
                    cur[q] += 1

    # every wire contributes its pieces; sideless pieces (wires without any
    # two-qubit gate) default to side 0
    pieces = [(q, i) for q in range(width) for i in range(cur[q] + 1)]
    local: dict[tuple[int, int], int] = {}
    maps: tuple[list[int], list[int]] = ([], [])
    for piece in pieces:
        side = piece_side.get(piece, 0)
        local[piece] = len(maps[side])
        maps[side].append(parent.qubit_map[piece[0]])
    side_of = {piece: piece_side.get(piece, 0) for piece in pieces}

    gates: tuple[list[Gate], list[Gate]] = ([], [])
    for gi, gate in enumerate(c.gates):
        spots = placements[gi]
        side = side_of[spots[0]]
        gates[side].append(
            Gate(
                gate.name,
                tuple(local[s] for s in spots),
                gate.params,
                is_measurement=gate.is_measurement,
            )
        )

    in_cuts: tuple[dict[int, int], dict[int, int]] = ({}, {})
    out_cuts: tuple[dict[int, int], dict[int, int]] = ({}, {})
    for cp in spec.cuts:
        up_piece = (cp.qubit, piece_of_gate[(cp.qubit, cp.upstream_gate)])
        down_piece = (cp.qubit, up_piece[1] + 1)
        out_cuts[side_of[up_piece]][cp.cut_id] = local[up_piece]
        in_cuts[side_of[down_piece]][cp.cut_id] = local[down_piece]
    # inherited roles: an in-cut enters at the wire start (first piece), an
    # out-cut leaves at the wire end (last piece)
    for cid, q in parent.in_cuts.items():
        piece = (q, 0)
        in_cuts[side_of[piece]][cid] = local[piece]
    for cid, q in parent.out_cuts.items():
        piece = (q, cur[q])
        out_cuts[side_of[piece]][cid] = local[piece]

    frags = []
    for side in (0, 1):
        if not maps[side]:
            raise PlanError("partition leaves one side empty")
        frags.append(
            Fragment(
                id=child_ids[side],
                circuit=Circuit(
                    width=len(maps[side]),
                    gates=tuple(gates[side]),
                    name=f"{c.name}.{side}",
                ),
                in_cuts=in_cuts[side],
                out_cuts=out_cuts[side],
                qubit_map=tuple(maps[side]),
            )
        )
    return frags[0], frags[1]


def fragment(c: Circuit, spec: CutSpec, pv, g: GateGraph) -> list[Fragment]:
    """Split ``c`` into the two sub-circuits induced by ``pv`` and ``spec``."""
    a, b = _split_fragment(_as_root_fragment(c), spec, pv, child_ids=(0, 1))
    return [a, b]


def enumerate_variants(f: Fragment) -> list[VariantRun]:
    """All measurement-basis / initialization combinations for a fragment."""
    out_ids = sorted(f.out_cuts)
    in_ids = sorted(f.in_cuts)
    variants = []
    for bases in itertools.product(MEAS_BASES, repeat=len(out_ids)):
        for inits in itertools.product(INIT_STATES, repeat=len(in_ids)):
            prep: list[Gate] = []
            for cid, state in zip(in_ids, inits):
                for name in _PREP_GATES[state]:
                    prep.append(Gate(name, (f.in_cuts[cid],)))
            post: list[Gate] = []
            for cid, basis in zip(out_ids, bases):
                for name in _BASIS_GATES[basis]:
                    post.append(Gate(name, (f.out_cuts[cid],)))
            circuit = Circuit(
                width=f.width,
                gates=tuple(prep) + f.circuit.gates + tuple(post),
                name=f.circuit.name,
            )
            variants.append(
                VariantRun(
                    fragment_id=f.id,
                    bases=dict(zip(out_ids, bases)),
                    inits=dict(zip(in_ids, inits)),
                    circuit=circuit,
                )
            )
    return variants


# ---------------------------------------------------------------------------
# Recursive fragmentation plan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Limits:
    """max_k caps the plan's total cut count: reconstruction work is 4^k."""

    max_depth: int = 8
    max_k: int = 8

    def __post_init__(self):
        if self.max_depth < 0 or self.max_k < 0:
            raise ValueError("limits must be non-negative")


@dataclass
class PlanNode:
    fragment: Fragment
    success: float
    status: str  # ok | split | unsplittable-gates | unsplittable-depth | unsplittable-k
    cut: CutSpec | None = None
    partition: list[int] | None = None
    children: list["PlanNode"] = field(default_factory=list)

    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class FragmentPlan:
    width: int
    threshold: float
    root: PlanNode
    limits: Limits
    seed: int
    solver: str
    solver_log: list[dict] = field(default_factory=list)

    def leaves(self) -> list[PlanNode]:
        out: list[PlanNode] = []

        def walk(node: PlanNode):
            if node.is_leaf():
                out.append(node)
            for child in node.children:
                walk(child)

        walk(self.root)
        return out

    def leaf_fragments(self) -> list[Fragment]:
        return [node.fragment for node in self.leaves()]

    def cut_ids(self) -> list[int]:
        ids = set()
        for f in self.leaf_fragments():
            ids.update(f.in_cuts)
            ids.update(f.out_cuts)
        return sorted(ids)

    @property
    def k(self) -> int:
        return len(self.cut_ids())


def _solver_seed(seed: int, node: int, salt: int) -> int:
    return (seed * 1_000_003 + node * 10_007 + salt) & 0x7FFFFFFF


DEFAULT_SA_ALPHAS = (2.0, 4.0, 8.0, 16.0)


def anneal_min_cut(
    g: GateGraph,
    seed: int = 0,
    sweeps: int = 4000,
    restarts: int = 4,
    alphas: tuple[float, ...] = DEFAULT_SA_ALPHAS,
    t_start: float | None = None,
    t_end: float | None = None,
) -> tuple[list[int], float, float]:
    """Best cut found by annealing a ladder of balance weights.

    With sum-normalized vertex weights the balance penalty at weight 1 is
    bounded by 1 while every crossing edge costs at least 1, so the
    weight-1 encoding's ground states are one-sided; stronger weights make
    proper cuts competitive. Every decoded configuration is re-scored with
    the exact cut cost (raw energies are never compared across encodings)
    and the cheapest proper cut wins.
    """
    best_pv: list[int] | None = None
    best_cost = math.inf
    best_energy = math.nan
    for ai, alpha in enumerate(alphas):
        model = build_ising(g, alpha=alpha)
        if t_start is not None and t_end is not None:
            schedule = AnnealSchedule(t_start=t_start, t_end=t_end, sweeps=sweeps)
        else:
            schedule = default_schedule(model, sweeps=sweeps)
        sa = simulated_anneal(
            model,
            schedule,
            seed=(seed * 31 + ai) & 0x7FFFFFFF,
            restarts=restarts,
        )
        pv = spins_to_partition(sa.spins)
        cost = partition_cost(pv, g)
        if cost < best_cost:
            best_pv, best_cost, best_energy = pv, cost, sa.energy
    if best_pv is None:
        best_pv = spins_to_partition([1] * g.n)
    return best_pv, best_cost, best_energy


def _choose_partition(
    g: GateGraph,
    solver: str,
    seed: int,
    node_index: int,
    ga_params: GaParams | None,
    sa_sweeps: int,
    sa_restarts: int,
    sa_alphas: tuple[float, ...],
    sa_t_start: float | None = None,
    sa_t_end: float | None = None,
) -> tuple[list[int], float, dict]:
    """Run the requested solvers and keep the cheaper cut (ties favor the GA)."""
    log: dict = {"vertices": g.n}
    candidates = []
    if solver in ("ga", "both"):
        params = ga_params or GaParams()
        ga_seed = _solver_seed(seed, node_index, 0)
        params = GaParams(
            c1=params.c1, c2=params.c2, max_passes=params.max_passes,
            seed=ga_seed,
            population=params.population, mutation=params.mutation,
            restarts=params.restarts,
        )
        res = find_min_cut_ga(g, params)
        log["ga"] = {
            "algorithm": "ga",
            "partition": list(res.partition),
            "cost": res.cost,
            "cut_size": cut_size(res.partition, g),
            "seed": ga_seed,
            "passes": res.passes,
        }
        candidates.append(("ga", res.partition, res.cost))
    if solver in ("anneal", "both"):
        sa_seed = _solver_seed(seed, node_index, 1)
        pv, cost, energy = anneal_min_cut(
            g,
            seed=sa_seed,
            sweeps=sa_sweeps,
            restarts=sa_restarts,
            alphas=sa_alphas,
            t_start=sa_t_start,
            t_end=sa_t_end,
        )
        log["anneal"] = {
            "algorithm": "anneal",
            "partition": list(pv),
            "cost": cost,
            "cut_size": cut_size(pv, g) if not math.isinf(cost) else None,
            "seed": sa_seed,
            "energy": energy,
        }
        candidates.append(("anneal", pv, cost))
    if not candidates:
        raise PlanError(f"unknown solver '{solver}'")
    # stable min: the GA is listed first, so ties pick it
    name, pv, cost = min(candidates, key=lambda t: t[2])
    if math.isinf(cost):
        raise PlanError("no proper cut found")
    log["chosen"] = name
    return list(pv), cost, log


def recursive_fragment(
    c: Circuit,
    p: NoiseProfile,
    threshold: float,
    limits: Limits | None = None,
    seed: int = 0,
    solver: str = "both",
    ga_params: GaParams | None = None,
    sa_sweeps: int = 4000,
    sa_restarts: int = 4,
    sa_alphas: tuple[float, ...] = DEFAULT_SA_ALPHAS,
    sa_t_start: float | None = None,
    sa_t_end: float | None = None,
) -> FragmentPlan:
    """Threshold-driven recursive bipartitioning.

    A (sub-)circuit whose estimated success probability reaches the
    threshold becomes a leaf; anything else is split by the cheaper of the
    two solvers and recursed, until the limits mark leaves unsplittable.
    """
    if not 0.0 <= threshold <= 1.0:
        raise PlanError(f"threshold must lie in [0, 1], got {threshold}")
    limits = limits or Limits()
    counters = {"fragment": 1, "cut": 0, "node": 0}
    solver_log: list[dict] = []

    def visit(frag: Fragment, depth: int) -> PlanNode:
        local_profile = p.for_subcircuit(frag.circuit, frag.qubit_map)
        est = success_probability(frag.circuit, local_profile)
        if est.success >= threshold:
            return PlanNode(fragment=frag, success=est.success, status="ok")
        if len(frag.circuit.two_qubit_indices()) < 2:
            return PlanNode(fragment=frag, success=est.success, status="unsplittable-gates")
        if depth >= limits.max_depth:
            return PlanNode(fragment=frag, success=est.success, status="unsplittable-depth")
        g = build_graph(frag.circuit, local_profile)
        node_index = counters["node"]
        counters["node"] += 1
        pv, cost, log = _choose_partition(
            g, solver, seed, node_index, ga_params, sa_sweeps, sa_restarts,
            sa_alphas, sa_t_start, sa_t_end,
        )
        k = int(round(cut_size(pv, g)))
        log["fragment"] = frag.id
        log["k"] = k
        solver_log.append(log)
        if counters["cut"] + k > limits.max_k:
            return PlanNode(fragment=frag, success=est.success, status="unsplittable-k")
        spec = derive_cut_points(pv, g, frag.circuit, first_id=counters["cut"])
        counters["cut"] += spec.k
        ids = (counters["fragment"], counters["fragment"] + 1)
        counters["fragment"] += 2
        a, b = _split_fragment(frag, spec, pv, child_ids=ids)
        node = PlanNode(
            fragment=frag, success=est.success, status="split", cut=spec, partition=pv
        )
        node.children = [visit(a, depth + 1), visit(b, depth + 1)]
        return node

    root = visit(_as_root_fragment(c), 0)
    return FragmentPlan(
        width=c.width,
        threshold=threshold,
        root=root,
        limits=limits,
        seed=seed,
        solver=solver,
        solver_log=solver_log,
    )


def single_cut_plan(c: Circuit, pv, g: GateGraph) -> FragmentPlan:
    """One forced split along ``pv``; useful for testing reconstruction."""
    spec = derive_cut_points(pv, g, c, first_id=0)
    root_frag = _as_root_fragment(c)
    a, b = _split_fragment(root_frag, spec, pv, child_ids=(1, 2))
    root = PlanNode(fragment=root_frag, success=0.0, status="split", cut=spec, partition=list(pv))
    root.children = [
        PlanNode(fragment=a, success=0.0, status="ok"),
        PlanNode(fragment=b, success=0.0, status="ok"),
    ]
    return FragmentPlan(
        width=c.width, threshold=0.0, root=root, limits=Limits(), seed=0, solver="manual"
    )


# ---------------------------------------------------------------------------
# Plan documents
# ---------------------------------------------------------------------------

def _fragment_to_dict(f: Fragment) -> dict:
    return {
        "id": f.id,
        "circuit": circuit_to_dict(f.circuit),
        "in_cuts": {str(cid): q for cid, q in sorted(f.in_cuts.items())},
        "out_cuts": {str(cid): q for cid, q in sorted(f.out_cuts.items())},
        "qubit_map": list(f.qubit_map),
    }


def _fragment_from_dict(doc: dict) -> Fragment:
    return Fragment(
        id=doc["id"],
        circuit=circuit_from_dict(doc["circuit"]),
        in_cuts={int(k): v for k, v in doc["in_cuts"].items()},
        out_cuts={int(k): v for k, v in doc["out_cuts"].items()},
        qubit_map=tuple(doc["qubit_map"]),
    )


def _node_to_dict(node: PlanNode) -> dict:
    doc = {
        "fragment": _fragment_to_dict(node.fragment),
        "success": node.success,
        "status": node.status,
    }
    if node.cut is not None:
        doc["cuts"] = [
            {
                "qubit": cp.qubit,
                "upstream_gate": cp.upstream_gate,
                "downstream_gate": cp.downstream_gate,
                "cut_id": cp.cut_id,
            }
            for cp in node.cut.cuts
        ]
    if node.partition is not None:
        doc["partition"] = list(node.partition)
    if node.children:
        doc["children"] = [_node_to_dict(child) for child in node.children]
    return doc


def _node_from_dict(doc: dict) -> PlanNode:
    cut = None
    if "cuts" in doc:
        cut = CutSpec(
            cuts=tuple(
                CutPoint(c["qubit"], c["upstream_gate"], c["downstream_gate"], c["cut_id"])
                for c in doc["cuts"]
            )
        )
    node = PlanNode(
        fragment=_fragment_from_dict(doc["fragment"]),
        success=doc["success"],
        status=doc["status"],
        cut=cut,
        partition=list(doc["partition"]) if "partition" in doc else None,
    )
    node.children = [_node_from_dict(child) for child in doc.get("children", [])]
    return node


def plan_to_dict(plan: FragmentPlan) -> dict:
    return {
        "version": 1,
        "width": plan.width,
        "threshold": plan.threshold,
        "k": plan.k,
        "cut_ids": plan.cut_ids(),
        "limits": {"max_depth": plan.limits.max_depth, "max_k": plan.limits.max_k},
        "seed": plan.seed,
        "solver": plan.solver,
        "solver_log": plan.solver_log,
        "tree": _node_to_dict(plan.root),
        "leaves": [node.fragment.id for node in plan.leaves()],
        "variant_counts": {
            str(node.fragment.id): 3 ** len(node.fragment.out_cuts)
            * 4 ** len(node.fragment.in_cuts)
            for node in plan.leaves()
        },
    }


def plan_from_dict(doc: dict) -> FragmentPlan:
    if doc.get("version") != 1:
        raise PlanError("unsupported plan document version")
    return FragmentPlan(
        width=doc["width"],
        threshold=doc["threshold"],
        root=_node_from_dict(doc["tree"]),
        limits=Limits(**doc["limits"]),
        seed=doc["seed"],
        solver=doc["solver"],
        solver_log=list(doc.get("solver_log", [])),
    )
