"""Independent brute-force oracles for tests and calibration.

Everything here is deliberately naive and shares nothing with the
production code paths beyond the domain types: partition costs are
re-derived from scratch over exhaustive enumerations, the noisy-evolution
reference builds explicit full-space matrices, and the closed-form error
model is evaluated in high-precision arithmetic. Exponential cost is
by design; hard size caps keep runs tractable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .circuit import Circuit
from .graph import GateGraph
from .ising import IsingModel
from .noise import NoiseProfile

__all__ = [
    "OracleReport",
    "compare_against_oracle",
    "brute_force_min_cost",
    "brute_force_ising_ground",
    "reference_density_evolution",
    "mp_gate_error_rate",
    "mp_success_probability",
]


@dataclass(frozen=True)
class OracleReport:
    """One oracle-vs-production comparison for a test-report document."""

    instance: str
    oracle_result: float
    production_result: float
    tolerance: float
    agree: bool

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "oracle_result": self.oracle_result,
            "production_result": self.production_result,
            "tolerance": self.tolerance,
            "agree": self.agree,
        }


def compare_against_oracle(
    instance: str, oracle_result: float, production_result: float, tolerance: float
) -> OracleReport:
    agree = abs(oracle_result - production_result) <= tolerance
    return OracleReport(
        instance=instance,
        oracle_result=oracle_result,
        production_result=production_result,
        tolerance=tolerance,
        agree=agree,
    )


def brute_force_min_cost(g: GateGraph, max_vertices: int = 20) -> tuple[list[int], float]:
    """Global optimum of the balanced-cut cost over all 2^n assignments."""
    n = g.n
    if n < 2:
        raise ValueError("need at least 2 vertices")
    if n > max_vertices:
        raise ValueError(f"brute force capped at {max_vertices} vertices, got {n}")
    codes = np.arange(1 << n, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n)) & 1  # column i = assignment of vertex i
    weights = np.array(g.weights())
    side1 = bits @ weights
    side0 = weights.sum() - side1
    cut = np.zeros(1 << n)
    for u, v, w in g.edge_list():
        cut += w * (bits[:, u] != bits[:, v])
    with np.errstate(divide="ignore", invalid="ignore"):  # one-sided rows masked below
        cost = cut * (1.0 / side0 + 1.0 / side1)
    proper = (bits.sum(axis=1) > 0) & (bits.sum(axis=1) < n)
    cost[~proper] = np.inf
    best = int(np.argmin(cost))
    return [int(b) for b in bits[best]], float(cost[best])


def brute_force_ising_ground(m: IsingModel, max_spins: int = 20) -> tuple[list[int], float]:
    """Global minimum energy over all 2^n spin configurations."""
    n = m.n
    if n > max_spins:
        raise ValueError(f"brute force capped at {max_spins} spins, got {n}")
    if n == 0:
        return [], m.offset
    codes = np.arange(1 << n, dtype=np.int64)
    spins = 2.0 * ((codes[:, None] >> np.arange(n)) & 1) - 1.0
    energy = spins @ np.array(m.h, dtype=float) + m.offset
    for (i, j), coupling in m.j.items():
        energy += coupling * spins[:, i] * spins[:, j]
    best = int(np.argmin(energy))
    return [int(s) for s in spins[best]], float(energy[best])


# ---------------------------------------------------------------------------
# Full-matrix noisy evolution
# ---------------------------------------------------------------------------

_I2 = np.eye(2, dtype=complex)


def _full_op(op: np.ndarray, qubits: tuple[int, ...], width: int) -> np.ndarray:
    """Embed a 1- or 2-qubit operator into the full 2^width space by kron.

    Qubit 0 owns the most significant bit of the computational index.
    """
    if len(qubits) == 1:
        mats = [_I2] * width
        mats[qubits[0]] = op
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out
    # general two-qubit embed: act on basis states directly
    a, b = qubits
    dim = 1 << width
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        abit = (col >> (width - 1 - a)) & 1
        bbit = (col >> (width - 1 - b)) & 1
        src = (abit << 1) | bbit
        for dst in range(4):
            amp = op[dst, src]
            if amp == 0:
                continue
            row = col
            row &= ~(1 << (width - 1 - a))
            row &= ~(1 << (width - 1 - b))
            row |= ((dst >> 1) & 1) << (width - 1 - a)
            row |= (dst & 1) << (width - 1 - b)
            full[row, col] += amp
    return full


def _unitary_of(gate) -> np.ndarray:
    """Local re-derivation of gate matrices (kept separate from the simulator)."""
    from math import cos, sin

    n, p = gate.name, gate.params
    s2 = 1.0 / math.sqrt(2.0)
    if n == "h":
        return np.array([[s2, s2], [s2, -s2]], dtype=complex)
    if n == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if n == "y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if n == "z":
        return np.diag([1, -1]).astype(complex)
    if n == "s":
        return np.diag([1, 1j]).astype(complex)
    if n == "sdg":
        return np.diag([1, -1j]).astype(complex)
    if n == "t":
        return np.diag([1, np.exp(1j * math.pi / 4)]).astype(complex)
    if n == "tdg":
        return np.diag([1, np.exp(-1j * math.pi / 4)]).astype(complex)
    if n == "rx":
        t = p[0] / 2
        return np.array([[cos(t), -1j * sin(t)], [-1j * sin(t), cos(t)]], dtype=complex)
    if n == "ry":
        t = p[0] / 2
        return np.array([[cos(t), -sin(t)], [sin(t), cos(t)]], dtype=complex)
    if n == "rz":
        t = p[0] / 2
        return np.diag([np.exp(-1j * t), np.exp(1j * t)]).astype(complex)
    if n == "u1":
        return np.diag([1, np.exp(1j * p[0])]).astype(complex)
    if n == "u2":
        phi, lam = p
        return s2 * np.array(
            [[1, -np.exp(1j * lam)], [np.exp(1j * phi), np.exp(1j * (phi + lam))]], dtype=complex
        )
    if n == "u3":
        th, phi, lam = p
        return np.array(
            [
                [cos(th / 2), -np.exp(1j * lam) * sin(th / 2)],
                [np.exp(1j * phi) * sin(th / 2), np.exp(1j * (phi + lam)) * cos(th / 2)],
            ],
            dtype=complex,
        )
    if n == "cx":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if n == "cz":
        return np.diag([1, 1, 1, -1]).astype(complex)
    raise ValueError(f"no unitary for gate '{n}'")


def reference_density_evolution(c: Circuit, p: NoiseProfile, max_width: int = 6) -> np.ndarray:
    """Density matrix of ``c`` under the gate-error + damping noise model.

    Mirrors the production model definition (ideal gate, then a Pauli
    channel per operand qubit, plus amplitude and phase damping over idle
    gaps) but computes everything with explicit 2^w x 2^w matrices and its
    own schedule walk.
    """
    w = c.width
    if w > max_width:
        raise ValueError(f"reference evolution capped at {max_width} qubits, got {w}")
    dim = 1 << w
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0

    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    Z = np.diag([1, -1]).astype(complex)

    def apply_kraus(rho, ops_2x2, q):
        out = np.zeros_like(rho)
        for k in ops_2x2:
            kf = _full_op(k, (q,), w)
            out += kf @ rho @ kf.conj().T
        return out

    def pauli_ops(err):
        ps = err / 3.0
        return [
            math.sqrt(max(1.0 - err, 0.0)) * _I2,
            math.sqrt(ps) * X,
            math.sqrt(ps) * Y,
            math.sqrt(ps) * Z,
        ]

    def damping_ops(tau, q):
        ops = []
        t1 = p.t1_us(q) * 1000.0
        if not math.isinf(t1):
            lam = 1.0 - math.exp(-tau / t1)
            ops.append([
                np.array([[1, 0], [0, math.sqrt(1 - lam)]], dtype=complex),
                np.array([[0, math.sqrt(lam)], [0, 0]], dtype=complex),
            ])
        t2 = p.t2_us(q) * 1000.0
        if not math.isinf(t2):
            inv_phi = 1.0 / t2 - (0.0 if math.isinf(t1) else 0.5 / t1)
            if inv_phi > 0:
                lam = 1.0 - math.exp(-tau * inv_phi)
                ops.append([
                    np.array([[1, 0], [0, math.sqrt(1 - lam)]], dtype=complex),
                    np.array([[0, 0], [0, math.sqrt(lam)]], dtype=complex),
                ])
        return ops

    # independent ASAP schedule walk
    free = [0.0] * w
    for g in c.gates:
        if g.is_measurement:
            continue
        start = max(free[q] for q in g.qubits)
        for q in g.qubits:
            gap = start - free[q]
            if gap > 0:
                for ops in damping_ops(gap, q):
                    rho = apply_kraus(rho, ops, q)
        u = _full_op(_unitary_of(g), g.qubits, w)
        rho = u @ rho @ u.conj().T
        err = p.gate_error(g)
        if err > 0:
            share = err if len(g.qubits) == 1 else err / 2.0
            for q in g.qubits:
                rho = apply_kraus(rho, pauli_ops(share), q)
        end = start + p.gate_duration(g)
        for q in g.qubits:
            free[q] = end
    makespan = max(free)
    for q in range(w):
        gap = makespan - free[q]
        if gap > 0:
            for ops in damping_ops(gap, q):
                rho = apply_kraus(rho, ops, q)
    return rho


# ---------------------------------------------------------------------------
# High-precision closed forms
# ---------------------------------------------------------------------------

def mp_gate_error_rate(k1: int, k2: int, p1, p2) -> float:
    """1 - (1-p1)^k1 (1-p2)^k2 evaluated with 50-digit arithmetic."""
    with mpmath.workdps(50):
        ok = (1 - mpmath.mpf(p1)) ** k1 * (1 - mpmath.mpf(p2)) ** k2
        return float(1 - ok)


def mp_success_probability(k1: int, k2: int, p1, p2, tau, t1, t2) -> float:
    """(1-p1)^k1 (1-p2)^k2 exp(-(tau/t1 + tau/t2)) in 50-digit arithmetic."""
    with mpmath.workdps(50):
        ok = (1 - mpmath.mpf(p1)) ** k1 * (1 - mpmath.mpf(p2)) ** k2
        decay = mpmath.e ** (-(mpmath.mpf(tau) / t1 + mpmath.mpf(tau) / t2))
        return float(ok * decay)
