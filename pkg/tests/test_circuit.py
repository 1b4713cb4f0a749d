from functools import reduce
from math import pi

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import full_operator, random_state
from qugan.circuit import (
    LayerKind,
    LayerSpec,
    ParamCircuit,
    ParamGate,
    bind_and_run,
    build_network,
    export_qasm,
    standard_layers,
    simulate_qasm,
)
from qugan.statevector import StateVector, basis_state, gate_matrix, zero_state
from qugan.swaptest import QubitLayout, build_swap_test

params4 = st.lists(st.floats(-2 * pi, 2 * pi, allow_nan=False), min_size=4, max_size=4)


def bivariate_network(qubits=(0, 1), n=None):
    return build_network(qubits, standard_layers(qubits), n)


def unitary(circuit, params):
    n = circuit.num_qubits
    cols = [bind_and_run(circuit, params, basis_state(n, i)).amplitudes for i in range(2**n)]
    return np.column_stack(cols)


def test_bivariate_network_has_four_params():
    c = bivariate_network()
    assert c.num_params == 4
    assert [g.kind for g in c.gates] == ["RY", "RY", "RYY", "CRY"]
    assert [g.param for g in c.gates] == [0, 1, 2, 3]
    assert c.gates[3].qubits == (0, 1)


def test_empty_network_is_identity():
    c = build_network([0, 1], [])
    assert c.gates == () and c.num_params == 0
    psi = random_state(np.random.default_rng(1), 2)
    out = bind_and_run(c, [], StateVector(2, psi))
    np.testing.assert_array_equal(out.amplitudes, psi)


def test_three_single_layers():
    c = build_network([0, 1, 2], [LayerSpec(LayerKind.SINGLE, (q,)) for q in range(3)])
    assert c.num_params == 3
    assert sum(1 for g in c.gates if g.kind == "RY") == 3 and len(c.gates) == 3


def test_layer_outside_register():
    with pytest.raises(ValueError):
        build_network([0, 1], [LayerSpec(LayerKind.SINGLE, (2,))])


@pytest.mark.parametrize("kind,qubits", [(LayerKind.SINGLE, (0, 1)), (LayerKind.DUAL, (0,)), (LayerKind.ENTANGLE, (1, 1))])
def test_layer_arity(kind, qubits):
    with pytest.raises(ValueError):
        LayerSpec(kind, qubits)


def test_three_qubit_layers_use_adjacent_pairs():
    layers = standard_layers([3, 4, 5])
    assert [layer.qubits for layer in layers if layer.kind is LayerKind.DUAL] == [(3, 4), (4, 5)]
    assert [layer.qubits for layer in layers if layer.kind is LayerKind.ENTANGLE] == [(3, 4)]


def test_bind_zero_params_identity():
    c = bivariate_network()
    np.testing.assert_allclose(bind_and_run(c, [0, 0, 0, 0]).amplitudes, [1, 0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(unitary(c, np.zeros(4)), np.eye(4), atol=1e-15)


def test_single_ry_pi():
    c = build_network([0], [LayerSpec(LayerKind.SINGLE, (0,))])
    np.testing.assert_allclose(bind_and_run(c, [pi]).amplitudes, [0, 1], atol=1e-15)


def test_wrong_param_count():
    with pytest.raises(ValueError):
        bind_and_run(bivariate_network(), [0.1, 0.2])


def test_wrong_initial_size():
    with pytest.raises(ValueError):
        bind_and_run(bivariate_network(), np.zeros(4), zero_state(3))


def test_param_slot_bounds():
    with pytest.raises(ValueError):
        ParamCircuit(1, (ParamGate("RY", (0,), param=1),), 1)
    with pytest.raises(ValueError):
        ParamCircuit(1, (ParamGate("H", (1,)),), 0)


@given(params4)
def test_discriminator_half_matches_matrix_chain(theta):
    c = bivariate_network()
    ops = [
        full_operator(gate_matrix("RY", theta[0]), (0,), 2),
        full_operator(gate_matrix("RY", theta[1]), (1,), 2),
        full_operator(gate_matrix("RYY", theta[2]), (0, 1), 2),
        full_operator(gate_matrix("CRY", theta[3]), (0, 1), 2),
    ]
    oracle = reduce(lambda acc, m: m @ acc, ops, np.eye(4))
    out = bind_and_run(c, theta)
    assert abs(out.norm() - 1) < 1e-12
    np.testing.assert_allclose(out.amplitudes, oracle[:, 0], atol=1e-10)


@given(params4, st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2))
def test_linearity(theta, a, b):
    c = bivariate_network()
    rng = np.random.default_rng(3)
    u, v = random_state(rng, 2), random_state(rng, 2)
    combo = bind_and_run(c, theta, StateVector(2, a * u + b * v)).amplitudes
    sep = a * bind_and_run(c, theta, StateVector(2, u)).amplitudes + b * bind_and_run(c, theta, StateVector(2, v)).amplitudes
    np.testing.assert_allclose(combo, sep, atol=1e-10)


def test_then_shifts_slots():
    a, b = bivariate_network((1, 2), 5), bivariate_network((3, 4), 5)
    c = a.then(b)
    assert c.num_params == 8
    assert [g.param for g in c.gates] == list(range(8))


def test_qasm_single_ry():
    c = build_network([0], [LayerSpec(LayerKind.SINGLE, (0,))])
    text = export_qasm(c, [pi / 2])
    body = [line for line in text.splitlines() if line.startswith("ry(")]
    assert body == [f"ry({pi / 2!r}) q[0];"]
    assert text.startswith("OPENQASM 2.0;\n")


def test_qasm_empty_circuit():
    text = export_qasm(ParamCircuit(2, (), 0), [])
    assert text == 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\n'


def full_circuit():
    layout = QubitLayout.for_dim(2)
    d = bivariate_network(layout.disc_qubits, 5)
    g = bivariate_network(layout.other_qubits, 5)
    return d.then(g).then(build_swap_test(layout))


@pytest.mark.parametrize("kind", ["RY", "CRY", "RYY", "CSWAP", "H"])
def test_qasm_round_trip_per_gate(kind, rng):
    arity = {"RY": 1, "H": 1, "CRY": 2, "RYY": 2, "CSWAP": 3}[kind]
    n = 3
    for _ in range(20):
        qubits = tuple(int(q) for q in rng.choice(n, arity, replace=False))
        angle = float(rng.uniform(-2 * pi, 2 * pi)) if kind in ("RY", "CRY", "RYY") else None
        c = ParamCircuit(n, (ParamGate(kind, qubits, angle=angle),), 0)
        text = export_qasm(c, [])
        u_qasm = np.column_stack([simulate_qasm(text, basis_state(n, i)).amplitudes for i in range(2**n)])
        np.testing.assert_allclose(u_qasm, unitary(c, []), atol=1e-8)


def test_qasm_round_trip_full_circuit(rng):
    c = full_circuit()
    for _ in range(5):
        theta = rng.uniform(0, pi, c.num_params)
        u_qasm = np.column_stack([simulate_qasm(export_qasm(c, theta), basis_state(5, i)).amplitudes for i in range(32)])
        np.testing.assert_allclose(u_qasm, unitary(c, theta), atol=1e-8)


def test_qasm_measurement_lines():
    c = full_circuit()
    text = export_qasm(c, np.zeros(8), measure=[0])
    assert "creg c[1];" in text and text.rstrip().endswith("measure q[0] -> c[0];")
    np.testing.assert_allclose(simulate_qasm(text).amplitudes, zero_state(5).amplitudes, atol=1e-12)


def test_qasm_parses_with_independent_parser(rng):
    qiskit = pytest.importorskip("qiskit")
    from qiskit import qasm2
    from qiskit.quantum_info import Operator

    c = full_circuit()
    theta = rng.uniform(0, pi, c.num_params)
    parsed = qasm2.loads(export_qasm(c, theta, measure=[0]))
    assert parsed.num_qubits == 5 and parsed.num_clbits == 1
    unmeasured = qasm2.loads(export_qasm(c, theta))
    # qiskit is little-endian as well, so the matrices compare directly (up to global phase)
    assert Operator(unmeasured).equiv(Operator(unitary(c, theta)), atol=1e-8)
    assert qiskit is not None
