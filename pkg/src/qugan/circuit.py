"""Parameterized circuits assembled from three unitary layer types.

* single-qubit unitary: ``RY(theta)`` on one qubit
* dual-qubit unitary:   ``RYY(theta)`` on a qubit pair
* entanglement unitary: ``CRY(theta)``, first qubit controls the second

Each layer consumes one fresh slot of the parameter vector, in layer order.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from math import pi

import numpy as np

from .statevector import (
    GATE_ARITY,
    PARAMETRIC,
    Gate,
    StateVector,
    apply_matrix,
    gate_matrix,
    zero_state,
)


class LayerKind(str, enum.Enum):
    SINGLE = "SingleQubitUnitary"
    DUAL = "DualQubitUnitary"
    ENTANGLE = "EntanglementUnitary"


_LAYER_GATE = {LayerKind.SINGLE: "RY", LayerKind.DUAL: "RYY", LayerKind.ENTANGLE: "CRY"}


@dataclass(frozen=True)
class LayerSpec:
    kind: LayerKind
    qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", LayerKind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        want = 1 if self.kind is LayerKind.SINGLE else 2
        if len(self.qubits) != want:
            raise ValueError(f"{self.kind.value} targets {want} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"layer targets must be distinct, got {self.qubits}")


@dataclass(frozen=True)
class ParamGate:
    """A gate whose angle is either fixed or read from a parameter slot."""

    kind: str
    qubits: tuple[int, ...]
    param: int | None = None
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != GATE_ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {GATE_ARITY[self.kind]} qubit(s)")
        if self.kind in PARAMETRIC and (self.param is None) == (self.angle is None):
            raise ValueError(f"{self.kind} needs exactly one of param slot / fixed angle")

    def resolve(self, params) -> Gate:
        angle = self.angle if self.param is None else float(params[self.param])
        return Gate(self.kind, self.qubits, angle if self.kind in PARAMETRIC else None)


@dataclass(frozen=True)
class ParamCircuit:
    num_qubits: int
    gates: tuple[ParamGate, ...]
    num_params: int

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(not 0 <= q < self.num_qubits for q in g.qubits):
                raise ValueError(f"gate {g} touches a qubit outside 0..{self.num_qubits - 1}")
            if g.param is not None and not 0 <= g.param < self.num_params:
                raise ValueError(f"gate {g} reads slot {g.param}, circuit has {self.num_params}")

    @property
    def qubits_used(self) -> frozenset[int]:
        return frozenset(q for g in self.gates for q in g.qubits)

    def bind(self, params) -> list[Gate]:
        params = _check_params(self, params)
        return [g.resolve(params) for g in self.gates]

    def then(self, other: "ParamCircuit") -> "ParamCircuit":
        """Append ``other``; its parameter slots are shifted past ours."""
        if other.num_qubits != self.num_qubits:
            raise ValueError("cannot compose circuits with different qubit counts")
        shifted = [
            ParamGate(g.kind, g.qubits, None if g.param is None else g.param + self.num_params, g.angle)
            for g in other.gates
        ]
        return ParamCircuit(self.num_qubits, self.gates + tuple(shifted), self.num_params + other.num_params)


def _check_params(circuit: ParamCircuit, params) -> np.ndarray:
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.size != circuit.num_params:
        raise ValueError(f"circuit takes {circuit.num_params} parameters, got {params.size}")
    return params


def build_network(qubits, layers, num_qubits: int | None = None) -> ParamCircuit:
    """Turn a layer list into a circuit, one parameter per layer.

    ``num_qubits`` defaults to ``max(qubits) + 1`` so a network can live on a
    sub-register of a larger device.
    """
    qubits = [int(q) for q in qubits]
    allowed = set(qubits)
    gates = []
    for slot, layer in enumerate(layers):
        if not set(layer.qubits) <= allowed:
            raise ValueError(f"layer {layer} targets qubits outside {sorted(allowed)}")
        gates.append(ParamGate(_LAYER_GATE[layer.kind], layer.qubits, param=slot))
    if num_qubits is None:
        num_qubits = max(qubits) + 1 if qubits else 1
    return ParamCircuit(num_qubits, tuple(gates), len(gates))


def standard_layers(qubits) -> list[LayerSpec]:
    """RY on every qubit, RYY on each adjacent pair, then a single CRY.

    For two qubits this is the 4-parameter bivariate architecture.
    """
    qubits = [int(q) for q in qubits]
    layers = [LayerSpec(LayerKind.SINGLE, (q,)) for q in qubits]
    layers += [LayerSpec(LayerKind.DUAL, (a, b)) for a, b in zip(qubits, qubits[1:])]
    if len(qubits) >= 2:
        layers.append(LayerSpec(LayerKind.ENTANGLE, (qubits[0], qubits[1])))
    return layers


def run_amplitudes(circuit: ParamCircuit, params, amps: np.ndarray) -> np.ndarray:
    """Raw-array version of :func:`bind_and_run`, used on hot paths."""
    params = _check_params(circuit, params)
    n = circuit.num_qubits
    for g in circuit.gates:
        angle = g.angle if g.param is None else params[g.param]
        amps = apply_matrix(amps, n, gate_matrix(g.kind, angle), g.qubits)
    return amps


def bind_and_run(circuit: ParamCircuit, params, initial: StateVector | None = None) -> StateVector:
    if initial is None:
        initial = zero_state(circuit.num_qubits)
    if initial.num_qubits != circuit.num_qubits:
        raise ValueError(
            f"circuit has {circuit.num_qubits} qubits, initial state has {initial.num_qubits}"
        )
    return StateVector(circuit.num_qubits, run_amplitudes(circuit, params, initial.amplitudes))


# --------------------------------------------------------------------------
# OpenQASM 2.0
#
# Decompositions into qelib1 gates:
#   CRY(t) c,t   ->  ry(t/2) t; cx c,t; ry(-t/2) t; cx c,t;
#   RYY(t) a,b   ->  rx(pi/2) a; rx(pi/2) b; cx a,b; rz(t) b; cx a,b;
#                    rx(-pi/2) a; rx(-pi/2) b;
#   CSWAP c,a,b  ->  cx b,a; ccx c,a,b; cx b,a;
# The RYY form conjugates exp(-i t/2 ZZ) by RX(pi/2), which maps Z to Y.
# --------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def _qasm_lines(gate: Gate) -> list[str]:
    q = [f"q[{i}]" for i in gate.qubits]
    t = gate.angle
    if gate.kind == "H":
        return [f"h {q[0]};"]
    if gate.kind == "RY":
        return [f"ry({_fmt(t)}) {q[0]};"]
    if gate.kind == "CRY":
        c, tg = q
        return [
            f"ry({_fmt(t / 2)}) {tg};",
            f"cx {c},{tg};",
            f"ry({_fmt(-t / 2)}) {tg};",
            f"cx {c},{tg};",
        ]
    if gate.kind == "RYY":
        a, b = q
        return [
            f"rx({_fmt(pi / 2)}) {a};",
            f"rx({_fmt(pi / 2)}) {b};",
            f"cx {a},{b};",
            f"rz({_fmt(t)}) {b};",
            f"cx {a},{b};",
            f"rx({_fmt(-pi / 2)}) {a};",
            f"rx({_fmt(-pi / 2)}) {b};",
        ]
    c, a, b = q
    return [f"cx {b},{a};", f"ccx {c},{a},{b};", f"cx {b},{a};"]


def export_qasm(circuit: ParamCircuit, params, measure=()) -> str:
    """Emit OpenQASM 2.0, one instruction per line.

    ``measure`` lists qubits to read out at the end, into ``c[0..]``.
    """
    measure = [int(m) for m in measure]
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{circuit.num_qubits}];",
    ]
    if measure:
        lines.append(f"creg c[{len(measure)}];")
    for gate in circuit.bind(params):
        lines.extend(_qasm_lines(gate))
    for i, m in enumerate(measure):
        lines.append(f"measure q[{m}] -> c[{i}];")
    return "\n".join(lines) + "\n"


def _rx(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _rz(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


_CX = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
_CCX = np.eye(8, dtype=complex)[[0, 1, 2, 3, 4, 5, 7, 6]]
_FIXED = {"h": gate_matrix("H"), "cx": _CX, "ccx": _CCX}
_ROT = {"rx": _rx, "ry": lambda t: gate_matrix("RY", t), "rz": _rz}

_INSTR = re.compile(r"^(\w+)(?:\(([^)]*)\))?\s+(.+);$")
_QREF = re.compile(r"^q\[(\d+)\]$")


def simulate_qasm(text: str, initial: StateVector | None = None) -> StateVector:
    """Run the gate subset produced by :func:`export_qasm`.

    ``rz`` is taken as diag(e^{-it/2}, e^{it/2}); qelib1 defines it up to a
    global phase, which is unobservable.  Measurements are ignored.
    """
    n = None
    amps = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//")[0].strip()
        if not line or line.startswith(("OPENQASM", "include", "creg", "measure", "barrier")):
            continue
        if line.startswith("qreg"):
            n = int(re.search(r"\[(\d+)\]", line).group(1))
            amps = (initial if initial is not None else zero_state(n)).amplitudes.copy()
            continue
        m = _INSTR.match(line)
        if m is None or amps is None:
            raise ValueError(f"line {lineno}: cannot interpret {raw!r}")
        name, arg, operands = m.groups()
        qubits = []
        for op in operands.split(","):
            qm = _QREF.match(op.strip())
            if qm is None:
                raise ValueError(f"line {lineno}: bad operand {op!r}")
            qubits.append(int(qm.group(1)))
        if name in _FIXED:
            mat = _FIXED[name]
        elif name in _ROT:
            mat = _ROT[name](float(arg))
        else:
            raise ValueError(f"line {lineno}: unsupported gate {name!r}")
        amps = apply_matrix(amps, n, mat, qubits)
    if amps is None:
        raise ValueError("program declares no qreg")
    return StateVector(n, amps)
