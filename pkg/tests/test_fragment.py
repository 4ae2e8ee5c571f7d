import random

import pytest

from helpers import random_circuit
from wirecut.circuit import Circuit, Gate, gate_counts, parse_qasm
from wirecut.fragment import (
    Fragment,
    Limits,
    PlanError,
    derive_cut_points,
    enumerate_variants,
    fragment,
    plan_from_dict,
    plan_to_dict,
    recursive_fragment,
    single_cut_plan,
)
from wirecut.graph import build_graph
from wirecut.noise import NoiseProfile
from wirecut.partition import cut_size

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'
FIG1 = parse_qasm(HEADER + "qreg q[5]; cx q[0],q[1]; cx q[1],q[2]; cx q[2],q[3]; cx q[3],q[4];", name="fig1")
GHZ3 = parse_qasm(HEADER + "qreg q[3]; h q[0]; cx q[0],q[1]; cx q[1],q[2];", name="ghz3")
QUIET = NoiseProfile()


def test_fig1_cut_points():
    g = build_graph(FIG1, QUIET)
    spec = derive_cut_points([0, 0, 1, 1], g, FIG1)
    assert spec.k == 1
    cp = spec.cuts[0]
    assert (cp.qubit, cp.upstream_gate, cp.downstream_gate) == (2, 1, 2)


def test_cut_points_disconnected_partition_is_empty():
    c = parse_qasm(HEADER + "qreg q[4]; cx q[0],q[1]; cx q[2],q[3];")
    g = build_graph(c, QUIET)
    spec = derive_cut_points([0, 1], g, c)
    assert spec.k == 0 and spec.cuts == ()


def test_cut_points_weight_two_edge_yields_two_cuts():
    c = parse_qasm(HEADER + "qreg q[2]; cx q[0],q[1]; cx q[0],q[1];")
    g = build_graph(c, QUIET)
    spec = derive_cut_points([0, 1], g, c)
    assert spec.k == 2
    assert {cp.qubit for cp in spec.cuts} == {0, 1}


def test_cut_points_match_cut_size():
    rng = random.Random(3)
    for _ in range(25):
        c = random_circuit(rng, rng.randint(2, 6), rng.randint(2, 16), two_q_prob=0.7)
        if len(c.two_qubit_indices()) < 2:
            continue
        g = build_graph(c, QUIET)
        pv = [rng.randint(0, 1) for _ in range(g.n)]
        if len(set(pv)) < 2:
            continue
        assert derive_cut_points(pv, g, c).k == int(cut_size(pv, g))


def test_cut_points_reject_one_sided():
    g = build_graph(FIG1, QUIET)
    with pytest.raises(PlanError, match="one-sided"):
        derive_cut_points([0, 0, 0, 0], g, FIG1)


def test_fig1_fragments_are_two_three_qubit_circuits():
    g = build_graph(FIG1, QUIET)
    spec = derive_cut_points([0, 0, 1, 1], g, FIG1)
    frags = fragment(FIG1, spec, [0, 0, 1, 1], g)
    assert sorted(f.width for f in frags) == [3, 3]
    upstream = next(f for f in frags if f.out_cuts)
    downstream = next(f for f in frags if f.in_cuts)
    assert len(upstream.out_cuts) == 1 and not upstream.in_cuts
    assert len(downstream.in_cuts) == 1 and not downstream.out_cuts
    assert sorted(upstream.qubit_map) == [0, 1, 2]
    assert sorted(downstream.qubit_map) == [2, 3, 4]


def test_fragment_kzero_has_no_cut_roles():
    c = parse_qasm(HEADER + "qreg q[4]; cx q[0],q[1]; cx q[2],q[3];")
    g = build_graph(c, QUIET)
    spec = derive_cut_points([0, 1], g, c)
    frags = fragment(c, spec, [0, 1], g)
    assert all(not f.in_cuts and not f.out_cuts for f in frags)
    assert sorted(f.width for f in frags) == [2, 2]


def test_ghz3_fragment_shapes():
    g = build_graph(GHZ3, QUIET)
    spec = derive_cut_points([0, 1], g, GHZ3)
    frags = fragment(GHZ3, spec, [0, 1], g)
    a = next(f for f in frags if f.out_cuts)
    b = next(f for f in frags if f.in_cuts)
    assert [(x.name, x.qubits) for x in a.circuit.gates] == [("h", (0,)), ("cx", (0, 1))]
    assert [(x.name, x.qubits) for x in b.circuit.gates] == [("cx", (0, 1))]
    assert a.qubit_map == (0, 1) and b.qubit_map == (1, 2)
    assert a.terminal_qubits() == [0]
    assert b.terminal_qubits() == [0, 1]


def test_every_gate_lands_in_exactly_one_fragment():
    rng = random.Random(7)
    for _ in range(25):
        c = random_circuit(rng, rng.randint(2, 7), rng.randint(2, 20), two_q_prob=0.6)
        if len(c.two_qubit_indices()) < 2:
            continue
        g = build_graph(c, QUIET)
        pv = [rng.randint(0, 1) for _ in range(g.n)]
        if len(set(pv)) < 2:
            continue
        spec = derive_cut_points(pv, g, c)
        frags = fragment(c, spec, pv, g)
        k1, k2 = gate_counts(c)
        assert sum(gate_counts(f.circuit)[0] for f in frags) == k1
        assert sum(gate_counts(f.circuit)[1] for f in frags) == k2
        assert sum(len(f.circuit.gates) for f in frags) == len(c.gates)


def test_gateless_wire_goes_to_first_fragment():
    c = parse_qasm(HEADER + "qreg q[4]; cx q[0],q[1]; cx q[1],q[2];")
    g = build_graph(c, QUIET)
    spec = derive_cut_points([0, 1], g, c)
    frags = fragment(c, spec, [0, 1], g)
    side0 = frags[0]
    assert 3 in side0.qubit_map  # untouched wire q3 rides along with side 0


def test_variant_counts():
    base = Circuit(width=3, gates=())
    f = Fragment(id=0, circuit=base, out_cuts={0: 0}, qubit_map=(0, 1, 2))
    assert len(enumerate_variants(f)) == 3
    f = Fragment(id=0, circuit=base, in_cuts={0: 0}, qubit_map=(0, 1, 2))
    assert len(enumerate_variants(f)) == 4
    f = Fragment(id=0, circuit=base, out_cuts={0: 0, 1: 1}, in_cuts={2: 2}, qubit_map=(0, 1, 2))
    assert len(enumerate_variants(f)) == 36
    f = Fragment(id=0, circuit=base, qubit_map=(0, 1, 2))
    variants = enumerate_variants(f)
    assert len(variants) == 1 and variants[0].key == "base"


def test_variant_synthesis_gates():
    base = Circuit(width=2, gates=(Gate("cx", (0, 1)),))
    f = Fragment(id=0, circuit=base, in_cuts={0: 0}, out_cuts={1: 1}, qubit_map=(0, 1))
    variants = {v.key: v for v in enumerate_variants(f)}
    assert len(variants) == 12
    v = variants["m1:Z;i0:zero"]
    assert [g.name for g in v.circuit.gates] == ["cx"]
    v = variants["m1:X;i0:one"]
    assert [g.name for g in v.circuit.gates] == ["x", "cx", "h"]
    v = variants["m1:Y;i0:plus_i"]
    assert [g.name for g in v.circuit.gates] == ["h", "s", "cx", "sdg", "h"]
    assert v.circuit.gates[0].qubits == (0,)
    assert v.circuit.gates[-1].qubits == (1,)


def test_recursive_threshold_zero_is_single_leaf():
    plan = recursive_fragment(FIG1, QUIET, threshold=0.0)
    assert len(plan.leaf_fragments()) == 1
    assert plan.k == 0
    assert plan.leaves()[0].status == "ok"


def test_recursive_single_split_synthetic_profile():
    # success(4 cx) ~ 0.60 and success(2 cx) ~ 0.775 at p2 = 1 - 0.6^(1/4)
    p2 = 1.0 - 0.6 ** 0.25
    prof = NoiseProfile(p1=0.0, p2=p2, t1_default_us=1e12, t2_default_us=1e12)
    plan = recursive_fragment(FIG1, prof, threshold=0.7, seed=5)
    assert plan.root.status == "split"
    assert len(plan.leaf_fragments()) == 2
    assert all(n.status == "ok" for n in plan.leaves())
    assert plan.root.success == pytest.approx(0.6, abs=1e-9)
    assert all(n.success == pytest.approx(0.6 ** 0.5, abs=1e-9) for n in plan.leaves())


def test_recursive_threshold_one_reaches_unsplittable_leaves():
    prof = NoiseProfile(p1=0.001, p2=0.01)
    plan = recursive_fragment(FIG1, prof, threshold=1.0, seed=5)
    assert all(n.status == "unsplittable-gates" for n in plan.leaves())
    assert all(len(n.fragment.circuit.two_qubit_indices()) < 2 for n in plan.leaves())


def test_recursive_respects_max_k_budget():
    prof = NoiseProfile(p1=0.001, p2=0.01)
    plan = recursive_fragment(FIG1, prof, threshold=1.0, seed=5, limits=Limits(max_k=1))
    assert plan.k <= 1


def test_recursive_respects_max_depth():
    prof = NoiseProfile(p1=0.001, p2=0.01)
    plan = recursive_fragment(FIG1, prof, threshold=1.0, seed=5, limits=Limits(max_depth=1))
    statuses = {n.status for n in plan.leaves()}
    assert "unsplittable-depth" in statuses or "unsplittable-gates" in statuses
    # depth 1 allows exactly one split
    assert len(plan.leaf_fragments()) <= 2


def test_leaf_count_non_decreasing_in_threshold():
    prof = NoiseProfile(p1=0.0, p2=0.03, t1_default_us=1e12, t2_default_us=1e12)
    counts = []
    for t in (0.0, 0.5, 0.85, 0.9, 0.95, 1.0):
        plan = recursive_fragment(FIG1, prof, threshold=t, seed=9)
        counts.append(len(plan.leaf_fragments()))
    assert counts == sorted(counts)


def test_cut_ids_pair_exactly_once_across_leaves():
    prof = NoiseProfile(p1=0.001, p2=0.01)
    plan = recursive_fragment(GHZ3, prof, threshold=1.0, seed=2)
    outs, ins = [], []
    for f in plan.leaf_fragments():
        outs.extend(f.out_cuts)
        ins.extend(f.in_cuts)
    assert sorted(outs) == plan.cut_ids()
    assert sorted(ins) == plan.cut_ids()


def test_plan_document_roundtrip():
    prof = NoiseProfile(p1=0.001, p2=0.01)
    plan = recursive_fragment(FIG1, prof, threshold=0.99, seed=4)
    doc = plan_to_dict(plan)
    again = plan_from_dict(doc)
    assert plan_to_dict(again) == doc
    assert again.k == plan.k
    assert [f.id for f in again.leaf_fragments()] == [f.id for f in plan.leaf_fragments()]


def test_single_cut_plan_matches_manual_fragment():
    g = build_graph(GHZ3, QUIET)
    plan = single_cut_plan(GHZ3, [0, 1], g)
    assert plan.k == 1
    assert len(plan.leaf_fragments()) == 2


def test_invalid_threshold_rejected():
    with pytest.raises(PlanError):
        recursive_fragment(FIG1, QUIET, threshold=1.5)
