"""Shared generators for randomized tests."""
import random

from wirecut.circuit import Circuit, Gate
from wirecut.graph import Edge, GateGraph, Vertex, WireSegment

ONE_QUBIT_GATES = ("h", "x", "y", "z", "s", "sdg", "t", "tdg", "rx", "ry", "rz")


def random_circuit(rng: random.Random, width: int, n_gates: int, two_q_prob: float = 0.5) -> Circuit:
    gates = []
    for _ in range(n_gates):
        if width >= 2 and rng.random() < two_q_prob:
            a, b = rng.sample(range(width), 2)
            gates.append(Gate(rng.choice(("cx", "cz")), (a, b)))
        else:
            name = rng.choice(ONE_QUBIT_GATES)
            params = (rng.uniform(0.0, 6.283),) if name in ("rx", "ry", "rz") else ()
            gates.append(Gate(name, (rng.randrange(width),), params))
    return Circuit(width=width, gates=tuple(gates), name="random")


def random_connected_graph(rng: random.Random, n: int) -> GateGraph:
    """Connected doubly-weighted graph: spanning tree plus extras."""
    raw = [rng.uniform(0.01, 1.0) for _ in range(n)]
    total = sum(raw)
    vertices = tuple(Vertex(i, i, raw[i] / total) for i in range(n))
    edges: dict[tuple[int, int], int] = {}
    nodes = list(range(n))
    rng.shuffle(nodes)
    for i in range(1, n):
        u, v = nodes[rng.randrange(i)], nodes[i]
        edges[(min(u, v), max(u, v))] = rng.choice((1, 1, 1, 2))
    for _ in range(rng.randrange(0, n)):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            edges.setdefault((min(u, v), max(u, v)), rng.choice((1, 1, 1, 2)))
    es = tuple(
        Edge(u, v, w, tuple(WireSegment(0, 0, 0) for _ in range(w)))
        for (u, v), w in sorted(edges.items())
    )
    return GateGraph(vertices=vertices, edges=es)
