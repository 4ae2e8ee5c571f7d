"""Error-balanced bipartitioning of the gate graph.

The cost of a cut is the weighted number of crossing edges scaled by the
inverse total vertex weight of each side:

    cost = cut_size * (1/weight(side0) + 1/weight(side1))

so cheap cuts both cross few wires and split the estimated error evenly.

The search is a small memetic genetic algorithm: a population of partition
vectors evolves by tournament selection, one-point crossover, and light
bit-flip mutation, and every offspring is refined by greedy bit-flip
descent (each flip is kept only when it lowers the cost). A generation
without improvement counts toward the stagnation budget ``c2``; when the
budget is exhausted the population is re-seeded, up to ``restarts`` times
or the pass cap. Given a seed the whole search is deterministic, and the
reported best-cost trace is non-increasing by construction.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .graph import GateGraph

__all__ = [
    "GaParams",
    "GaResult",
    "cut_size",
    "partition_cost",
    "crossover",
    "find_min_cut_ga",
]

INFEASIBLE = math.inf


@dataclass(frozen=True)
class GaParams:
    """Search knobs.

    c1: crossover split fraction in (0, 1).
    c2: stagnant generations tolerated before the population is re-seeded.
    max_passes: hard cap on total generations (None means 50 * n_vertices).
    population: vectors per generation.
    mutation: per-bit flip probability after crossover (None means 1/n).
    restarts: fresh populations tried within the pass budget.
    """

    c1: float = 0.5
    c2: int = 3
    max_passes: int | None = None
    seed: int = 0
    population: int = 24
    mutation: float | None = None
    restarts: int = 3

    def __post_init__(self):
        if not 0.0 < self.c1 < 1.0:
            raise ValueError(f"c1 must lie in (0, 1), got {self.c1}")
        if self.c2 < 0:
            raise ValueError(f"c2 must be >= 0, got {self.c2}")
        if self.max_passes is not None and self.max_passes < 1:
            raise ValueError(f"max_passes must be >= 1, got {self.max_passes}")
        if self.population < 2:
            raise ValueError(f"population must be >= 2, got {self.population}")
        if self.mutation is not None and not 0.0 <= self.mutation <= 1.0:
            raise ValueError(f"mutation must lie in [0, 1], got {self.mutation}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")


@dataclass
class GaResult:
    partition: list[int]
    cost: float
    passes: int
    trace: list[float] = field(default_factory=list)  # best cost after each generation


def cut_size(pv, g: GateGraph) -> float:
    """Weighted count of edges whose endpoints sit in different parts."""
    if len(pv) != g.n:
        raise ValueError(f"partition length {len(pv)} != vertex count {g.n}")
    total = 0.0
    for e in g.edges:
        d = pv[e.u] - pv[e.v]
        total += e.weight * d * d
    return total


def partition_cost(pv, g: GateGraph) -> float:
    """Cut size scaled by inverse per-side weights; +inf for one-sided vectors."""
    if len(pv) != g.n:
        raise ValueError(f"partition length {len(pv)} != vertex count {g.n}")
    # both sides summed directly so complementing the labels swaps the sums
    # exactly (label-flip invariance holds to the last ulp)
    w0 = 0.0
    w1 = 0.0
    n1 = 0
    for v in g.vertices:
        if pv[v.id]:
            w1 += v.weight
            n1 += 1
        else:
            w0 += v.weight
    if n1 == 0 or n1 == g.n:
        return INFEASIBLE
    return cut_size(pv, g) * (1.0 / w0 + 1.0 / w1)


def crossover(v1, v2, c1: float = 0.5) -> list[int]:
    """One-point recombination: first floor(c1*N) bits of v1, tail of v2."""
    if len(v1) != len(v2):
        raise ValueError(f"vector lengths differ: {len(v1)} != {len(v2)}")
    split = int(c1 * len(v1))
    return list(v1[:split]) + list(v2[split:])


class _Scorer:
    """Incremental cut/weight bookkeeping so a flip candidate costs O(degree)."""

    def __init__(self, g: GateGraph):
        self.n = g.n
        self.weights = g.weights()
        self.total = sum(self.weights)
        self.adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
        for u, v, w in g.edge_list():
            self.adj[u].append((v, w))
            self.adj[v].append((u, w))

    def evaluate(self, pv) -> tuple[int, float, int]:
        cut = 0
        w1 = 0.0
        n1 = 0
        for i in range(self.n):
            if pv[i]:
                n1 += 1
                w1 += self.weights[i]
                for j, w in self.adj[i]:
                    if not pv[j]:
                        cut += w
        return cut, w1, n1

    def cost(self, cut: int, w1: float, n1: int) -> float:
        # emptiness is judged on the integer count: the float accumulator can
        # leave a tiny residue that would make a one-sided vector look proper
        if n1 == 0 or n1 == self.n:
            return INFEASIBLE
        w0 = self.total - w1
        return cut * (1.0 / w0 + 1.0 / w1)

    def refine(self, pv: list[int]) -> float:
        """Greedy descent to a local optimum; mutates pv in place."""
        cut, w1, n1 = self.evaluate(pv)
        cost = self.cost(cut, w1, n1)
        improved = True
        while improved:
            improved = False
            for i in range(self.n):
                dcut = 0
                for j, w in self.adj[i]:
                    dcut += w if pv[i] == pv[j] else -w
                ncut = cut + dcut
                if pv[i]:
                    nw1, nn1 = w1 - self.weights[i], n1 - 1
                else:
                    nw1, nn1 = w1 + self.weights[i], n1 + 1
                ncost = self.cost(ncut, nw1, nn1)
                if ncost < cost:
                    pv[i] ^= 1
                    cut, w1, n1, cost = ncut, nw1, nn1, ncost
                    improved = True
        return cost


def find_min_cut_ga(
    g: GateGraph,
    params: GaParams | None = None,
    initial=None,
) -> GaResult:
    """Search for a minimum-cost balanced cut of ``g``.

    Returns the best vector ever observed with its cost; the cost never
    exceeds that of ``initial`` when one is given, and it is finite
    whenever any proper cut exists (one-sided vectors score +inf and are
    passed through, never returned).
    """
    if g.n < 2:
        raise ValueError("partitioning needs at least 2 vertices")
    params = params or GaParams()
    n = g.n
    max_passes = params.max_passes if params.max_passes is not None else 50 * n
    mutation = params.mutation if params.mutation is not None else 1.0 / n
    rng = random.Random(params.seed)
    scorer = _Scorer(g)

    best_vec: list[int] | None = None
    best_cost = INFEASIBLE
    trace: list[float] = []
    passes = 0

    def note(cost: float, vec: list[int]):
        nonlocal best_cost, best_vec
        if cost < best_cost:
            best_cost, best_vec = cost, list(vec)

    for restart in range(params.restarts):
        pop: list[tuple[float, list[int]]] = []
        if restart == 0 and initial is not None:
            vec = list(initial)
            if len(vec) != n:
                raise ValueError(f"initial vector length {len(vec)} != vertex count {n}")
            note(partition_cost(vec, g), vec)
            cost = scorer.refine(vec)
            note(cost, vec)
            pop.append((cost, vec))
        while len(pop) < params.population:
            vec = [rng.randint(0, 1) for _ in range(n)]
            if len(set(vec)) == 1:
                vec[rng.randrange(n)] ^= 1  # one-sided starts stall on +inf
            cost = scorer.refine(vec)
            note(cost, vec)
            pop.append((cost, vec))
        pop.sort(key=lambda t: t[0])

        stagnant = 0
        while stagnant <= params.c2 and passes < max_passes:
            prev_best = pop[0][0]
            newpop = [(pop[0][0], list(pop[0][1]))]  # elitism
            while len(newpop) < params.population:
                pa = min(rng.sample(pop, min(3, len(pop))), key=lambda t: t[0])
                pb = min(rng.sample(pop, min(3, len(pop))), key=lambda t: t[0])
                child = crossover(pa[1], pb[1], params.c1)
                for i in range(n):
                    if rng.random() < mutation:
                        child[i] ^= 1
                cost = scorer.refine(child)
                note(cost, child)
                newpop.append((cost, child))
            pop = sorted(newpop, key=lambda t: t[0])
            passes += 1
            trace.append(best_cost)
            stagnant = 0 if pop[0][0] < prev_best - 1e-15 else stagnant + 1
        if passes >= max_passes:
            break

    assert best_vec is not None
    # report the exact cost of the winner, not the incrementally tracked one
    return GaResult(
        partition=best_vec,
        cost=partition_cost(best_vec, g),
        passes=passes,
        trace=trace,
    )
