import math
import random

import pytest

from helpers import random_circuit
from wirecut.circuit import Circuit, Gate
from wirecut.noise import NoiseProfile, ProfileError, gate_error_prob, load_profile, success_probability
from wirecut.oracles import mp_gate_error_rate, mp_success_probability

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'

DOC = """
{"version": 1,
 "defaults": {"p1": 0.001, "p2": 0.01, "d1_ns": 50, "d2_ns": 300, "t1_us": 100, "t2_us": 80},
 "qubits": [{"id": 0, "t1_us": 90, "t2_us": 70}],
 "gates": [{"name": "cx", "qubits": [0, 1], "error": 0.02, "duration_ns": 400}]}
"""


def test_load_defaults_only():
    p = load_profile('{"version": 1, "defaults": {"p1": 0.001, "p2": 0.01}}')
    assert p.gate_error(Gate("h", (3,))) == 0.001
    assert p.gate_error(Gate("cx", (1, 2))) == 0.01


def test_per_gate_override():
    p = load_profile(DOC)
    assert p.gate_error(Gate("cx", (0, 1))) == 0.02
    assert p.gate_duration(Gate("cx", (0, 1))) == 400
    assert p.gate_error(Gate("cx", (1, 2))) == 0.01  # falls back to default
    assert p.t1_us(0) == 90
    assert p.t1_us(5) == 100  # default


def test_missing_t1_is_schema_error():
    with pytest.raises(ProfileError, match="t1_us"):
        load_profile('{"version": 1, "qubits": [{"id": 0, "t2_us": 50}]}')


def test_probability_out_of_range_rejected():
    with pytest.raises(ProfileError, match=r"\[0, 1\]"):
        load_profile('{"version": 1, "defaults": {"p1": 1.5}}')


def test_unphysical_t2_warns_but_loads():
    with pytest.warns(UserWarning, match="unphysical"):
        p = load_profile('{"version": 1, "qubits": [{"id": 0, "t1_us": 10, "t2_us": 50}]}')
    assert p.t2_us(0) == 50


def test_measure_has_no_error_or_duration():
    p = load_profile(DOC)
    m = Gate("measure", (0,), is_measurement=True)
    assert p.gate_error(m) == 0.0
    assert p.gate_duration(m) == 0.0


def test_gate_error_matches_closed_form():
    # 10 single-qubit gates at p1=0.001 plus 5 two-qubit gates at p2=0.01
    p = NoiseProfile(p1=0.001, p2=0.01)
    gates = tuple(Gate("h", (0,)) for _ in range(10)) + tuple(Gate("cx", (0, 1)) for _ in range(5))
    c = Circuit(width=2, gates=gates)
    expected = mp_gate_error_rate(10, 5, 0.001, 0.01)
    assert gate_error_prob(c, p) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.058478, abs=1e-6)


def test_gate_error_edge_cases():
    p = NoiseProfile()
    assert gate_error_prob(Circuit(width=1, gates=()), p) == 0.0
    full = NoiseProfile(p1=1.0)
    assert gate_error_prob(Circuit(width=1, gates=(Gate("x", (0,)),)), full) == 1.0


def test_success_probability_closed_form():
    # tau = 10*40 + 5*120 = 1000 ns = 1 us on a serial wire; T1=100us, T2=50us
    p = NoiseProfile(p1=0.001, p2=0.01, d1_ns=40.0, d2_ns=120.0,
                     t1_default_us=100.0, t2_default_us=50.0)
    gates = tuple(Gate("h", (0,)) for _ in range(10)) + tuple(Gate("cx", (0, 1)) for _ in range(5))
    est = success_probability(Circuit(width=2, gates=gates), p)
    assert est.tau_ns == 1000.0
    expected = mp_success_probability(10, 5, 0.001, 0.01, 1.0, 100.0, 50.0)
    assert est.success == pytest.approx(expected, abs=1e-12)
    assert est.success == pytest.approx(0.913697, abs=1e-6)
    assert est.p_error == pytest.approx(1.0 - est.success, abs=1e-15)


def test_success_empty_circuit_is_one():
    p = NoiseProfile()
    est = success_probability(Circuit(width=3, gates=()), p)
    assert est.success == 1.0
    assert est.tau_ns == 0.0


def test_success_collapses_for_long_circuits():
    # tau = 10 us against T1 = T2 = 1 us
    p = NoiseProfile(p1=0.0, p2=0.0, d1_ns=1000.0, t1_default_us=1.0, t2_default_us=1.0)
    gates = tuple(Gate("x", (0,)) for _ in range(10))
    est = success_probability(Circuit(width=1, gates=gates), p)
    assert est.success == pytest.approx(math.exp(-20.0), rel=1e-9)
    assert est.success < 2.1e-9  # exp(-20) = 2.06e-9, effectively zero


def test_success_uses_min_t1_t2_over_touched_qubits():
    from wirecut.noise import QubitCal
    p = NoiseProfile(p1=0.0, p2=0.0, d1_ns=1000.0,
                     qubits={0: QubitCal(10.0, 8.0), 1: QubitCal(2.0, 1.0), 5: QubitCal(0.1, 0.1)})
    c = Circuit(width=6, gates=(Gate("x", (0,)), Gate("x", (1,))))
    est = success_probability(c, p)
    # tau=1us, min T1=2us, min T2=1us among touched {0,1}; qubit 5 is untouched
    assert est.success == pytest.approx(math.exp(-(0.5 + 1.0)), rel=1e-12)


def test_adding_a_gate_never_increases_success():
    rng = random.Random(11)
    for _ in range(100):
        width = rng.randint(1, 5)
        c = random_circuit(rng, width, rng.randint(0, 12))
        p = NoiseProfile(
            p1=rng.uniform(0, 0.02), p2=rng.uniform(0, 0.05),
            d1_ns=rng.uniform(10, 100), d2_ns=rng.uniform(100, 500),
            t1_default_us=rng.uniform(20, 200), t2_default_us=rng.uniform(10, 100),
        )
        base = success_probability(c, p).success
        extra = random_circuit(rng, width, 1).gates
        pos = rng.randint(0, len(c.gates))
        grown = Circuit(width=width, gates=c.gates[:pos] + extra + c.gates[pos:])
        assert success_probability(grown, p).success <= base + 1e-12


def test_for_subcircuit_remaps_queries():
    p = load_profile(DOC)
    # local circuit: cx on local (0,1) which are original (1,0) -> override applies reversed?
    c = Circuit(width=2, gates=(Gate("cx", (0, 1)),))
    local = p.for_subcircuit(c, qubit_map=(0, 1))
    assert local.gate_error(Gate("cx", (0, 1))) == 0.02
    shifted = p.for_subcircuit(c, qubit_map=(1, 2))
    assert shifted.gate_error(Gate("cx", (0, 1))) == 0.01  # original (1,2) has no override
    assert shifted.t1_us(0) == 100  # original qubit 1 uses the default
    assert p.for_subcircuit(c, qubit_map=(0, 5)).t1_us(0) == 90
