import math
import random

import pytest

from helpers import random_circuit
from wirecut.circuit import (
    Circuit,
    QasmError,
    asap_schedule,
    circuit_from_dict,
    circuit_to_dict,
    gate_counts,
    parse_qasm,
    schedule_makespan,
    to_qasm,
)
from wirecut.noise import NoiseProfile

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def test_parse_basic():
    c = parse_qasm(HEADER + "qreg q[2];\nh q[0]; cx q[0],q[1];")
    assert c.width == 2
    assert [(g.name, g.qubits) for g in c.gates] == [("h", (0,)), ("cx", (0, 1))]


def test_parse_empty_body():
    c = parse_qasm(HEADER + "qreg q[4];")
    assert c.width == 4
    assert c.gates == ()


def test_parse_rejects_three_qubit_gate():
    with pytest.raises(QasmError, match="ccx"):
        parse_qasm(HEADER + "qreg q[3]; ccx q[0],q[1],q[2];")


def test_parse_rejects_out_of_range_index():
    with pytest.raises(QasmError, match="out of range"):
        parse_qasm(HEADER + "qreg q[2]; h q[5];")


def test_parse_rejects_if_and_second_qreg():
    with pytest.raises(QasmError, match="classical control"):
        parse_qasm(HEADER + "qreg q[1]; creg c[1]; if (c==0) x q[0];")
    with pytest.raises(QasmError, match="multiple quantum registers"):
        parse_qasm(HEADER + "qreg q[1]; qreg r[1];")


def test_parse_rejects_mid_circuit_measurement():
    with pytest.raises(QasmError, match="after its measurement"):
        parse_qasm(HEADER + "qreg q[1]; creg c[1]; measure q[0] -> c[0]; x q[0];")


def test_parse_reports_line_numbers():
    src = HEADER + "qreg q[2];\nh q[0];\nbogus q[1];"
    with pytest.raises(QasmError) as err:
        parse_qasm(src)
    assert err.value.line == 5


def test_swap_rewrites_to_three_cx():
    c = parse_qasm(HEADER + "qreg q[2]; swap q[0],q[1];")
    assert [g.name for g in c.gates] == ["cx", "cx", "cx"]
    assert [g.qubits for g in c.gates] == [(0, 1), (1, 0), (0, 1)]


def test_parse_angle_expressions():
    c = parse_qasm(HEADER + "qreg q[1]; rz(pi/2) q[0]; u3(0.1,-pi,2*pi) q[0];")
    assert c.gates[0].params[0] == pytest.approx(math.pi / 2)
    assert c.gates[1].params == pytest.approx((0.1, -math.pi, 2 * math.pi))


def test_gate_arity_validation():
    with pytest.raises(QasmError):
        parse_qasm(HEADER + "qreg q[2]; rz q[0];")  # missing parameter
    with pytest.raises(QasmError):
        parse_qasm(HEADER + "qreg q[2]; cx q[0];")  # missing operand
    with pytest.raises(QasmError, match="repeated"):
        parse_qasm(HEADER + "qreg q[2]; cx q[0],q[0];")


def test_roundtrip_is_gate_identical():
    rng = random.Random(3)
    for _ in range(25):
        c = random_circuit(rng, rng.randint(1, 6), rng.randint(0, 20))
        again = parse_qasm(to_qasm(c))
        assert again.width == c.width
        assert again.gates == c.gates


def test_roundtrip_preserves_measurements():
    src = HEADER + "qreg q[2]; creg c[2]; h q[0]; measure q[0] -> c[0];"
    c = parse_qasm(src)
    assert c.gates[-1].is_measurement
    assert parse_qasm(to_qasm(c)).gates == c.gates


def test_dict_roundtrip():
    rng = random.Random(4)
    c = random_circuit(rng, 4, 12)
    assert circuit_from_dict(circuit_to_dict(c)).gates == c.gates


def test_gate_counts():
    assert gate_counts(parse_qasm(HEADER + "qreg q[2]; h q[0]; cx q[0],q[1];")) == (1, 1)
    assert gate_counts(parse_qasm(HEADER + "qreg q[2];")) == (0, 0)
    fig1 = parse_qasm(HEADER + "qreg q[5]; cx q[0],q[1]; cx q[1],q[2]; cx q[2],q[3]; cx q[3],q[4];")
    assert gate_counts(fig1) == (0, 4)


def test_gate_counts_exclude_measurements():
    c = parse_qasm(HEADER + "qreg q[1]; creg c[1]; x q[0]; measure q[0] -> c[0];")
    assert gate_counts(c) == (1, 0)
    assert sum(gate_counts(c)) == sum(1 for g in c.gates if not g.is_measurement)


def test_makespan_parallel_wires():
    p = NoiseProfile(d1_ns=50.0, d2_ns=300.0)
    c = parse_qasm(HEADER + "qreg q[2]; h q[0]; h q[1];")
    assert schedule_makespan(c, p) == 50.0


def test_makespan_chain():
    p = NoiseProfile(d1_ns=50.0, d2_ns=300.0)
    c = parse_qasm(HEADER + "qreg q[2]; h q[0]; cx q[0],q[1];")
    assert schedule_makespan(c, p) == 350.0


def test_makespan_empty():
    p = NoiseProfile()
    assert schedule_makespan(parse_qasm(HEADER + "qreg q[3];"), p) == 0.0


def test_makespan_monotone_under_append():
    rng = random.Random(9)
    p = NoiseProfile()
    for _ in range(50):
        c = random_circuit(rng, rng.randint(2, 5), rng.randint(0, 15))
        extra = random_circuit(rng, c.width, 1).gates
        longer = Circuit(width=c.width, gates=c.gates + extra)
        assert schedule_makespan(longer, p) >= schedule_makespan(c, p)


def test_schedule_respects_wire_order():
    p = NoiseProfile(d1_ns=10.0, d2_ns=100.0)
    c = parse_qasm(HEADER + "qreg q[3]; cx q[0],q[1]; h q[2]; cx q[1],q[2];")
    spans, makespan = asap_schedule(c, p)
    assert spans[0] == (0.0, 100.0)
    assert spans[1] == (0.0, 10.0)
    assert spans[2] == (100.0, 200.0)  # waits for the first cx
    assert makespan == 200.0


def test_circuit_immutability():
    c = parse_qasm(HEADER + "qreg q[1]; x q[0];")
    with pytest.raises(Exception):
        c.width = 5
    with pytest.raises(Exception):
        c.gates[0].name = "z"
