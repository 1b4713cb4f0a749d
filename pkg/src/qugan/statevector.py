"""Dense state-vector simulation.

Ordering convention is little-endian: qubit ``q`` is bit ``q`` of the basis
index, so for two qubits the amplitude order is |q1 q0> = 00, 01, 10, 11.

Gate matrices are written in the basis of their *operand list*, with the
first operand as the most significant bit.  For ``CRY`` the operands are
``(control, target)``, which makes the 4x4 matrix the familiar block form
``diag(I, RY)``; ``CSWAP`` operands are ``(control, a, b)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import cos, sin, sqrt

import numpy as np

from .errors import ConfigurationError

MAX_QUBITS = 24

GATE_ARITY = {"H": 1, "RY": 1, "CRY": 2, "RYY": 2, "CSWAP": 3}
PARAMETRIC = frozenset({"RY", "CRY", "RYY"})

_H = np.array([[1, 1], [1, -1]], dtype=complex) / sqrt(2)

_CSWAP = np.eye(8, dtype=complex)
_CSWAP[[5, 6]] = _CSWAP[[6, 5]]


def ry_matrix(theta: float) -> np.ndarray:
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def cry_matrix(theta: float) -> np.ndarray:
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = ry_matrix(theta)
    return m


def ryy_matrix(theta: float) -> np.ndarray:
    # Same entries as exp(-i theta/2 Y(x)Y): +i sin on the anti-diagonal corners,
    # -i sin in the middle block.
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array(
        [
            [c, 0, 0, 1j * s],
            [0, c, -1j * s, 0],
            [0, -1j * s, c, 0],
            [1j * s, 0, 0, c],
        ],
        dtype=complex,
    )


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    """Unitary for a gate kind, in operand-list basis order."""
    if kind == "H":
        return _H
    if kind == "CSWAP":
        return _CSWAP
    if kind not in PARAMETRIC:
        raise ValueError(f"unknown gate kind {kind!r}")
    if angle is None:
        raise ValueError(f"{kind} requires an angle")
    if kind == "RY":
        return ry_matrix(angle)
    if kind == "CRY":
        return cry_matrix(angle)
    return ryy_matrix(angle)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != GATE_ARITY[self.kind]:
            raise ValueError(
                f"{self.kind} acts on {GATE_ARITY[self.kind]} qubit(s), got {self.qubits}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"operand qubits must be distinct, got {self.qubits}")
        if self.kind in PARAMETRIC and self.angle is None:
            raise ValueError(f"{self.kind} requires an angle")

    def matrix(self) -> np.ndarray:
        return gate_matrix(self.kind, self.angle)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Immutable n-qubit pure state."""

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.num_qubits:
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes for {self.num_qubits} qubits, "
                f"got {amps.size}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def _check_count(num_qubits: int) -> None:
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ConfigurationError(
            f"qubit count must be in [1, {MAX_QUBITS}], got {num_qubits}"
        )


def zero_state(num_qubits: int) -> StateVector:
    _check_count(num_qubits)
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def basis_state(num_qubits: int, index: int) -> StateVector:
    _check_count(num_qubits)
    if not 0 <= index < 2**num_qubits:
        raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def _check_operands(qubits, num_qubits: int) -> None:
    for q in qubits:
        if not 0 <= q < num_qubits:
            raise ValueError(f"qubit {q} out of range for a {num_qubits}-qubit state")


def apply_matrix(amps: np.ndarray, num_qubits: int, matrix: np.ndarray, qubits) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to raw amplitudes; returns a new array."""
    k = len(qubits)
    psi = amps.reshape((2,) * num_qubits)
    axes = [num_qubits - 1 - q for q in qubits]
    u = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes).reshape(-1)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    _check_operands(gate.qubits, state.num_qubits)
    amps = apply_matrix(state.amplitudes, state.num_qubits, gate.matrix(), gate.qubits)
    return StateVector(state.num_qubits, amps)


def prob_one(state: StateVector, qubit: int) -> float:
    """Exact probability of measuring 1 on ``qubit``."""
    _check_operands((qubit,), state.num_qubits)
    idx = np.arange(state.amplitudes.size)
    mask = ((idx >> qubit) & 1).astype(bool)
    return float(np.sum(np.abs(state.amplitudes[mask]) ** 2))


@dataclass(frozen=True, eq=False)
class ShotResult:
    """Measured bits, one row per shot, columns in the order of ``qubits``."""

    qubits: tuple[int, ...]
    bits: np.ndarray = field(repr=False)

    @property
    def shots(self) -> int:
        return int(self.bits.shape[0])

    def means(self) -> np.ndarray:
        return self.bits.mean(axis=0)

    def bitstrings(self) -> list[str]:
        return ["".join(str(b) for b in row) for row in self.bits]


def sample(state: StateVector, qubits, shots: int, seed) -> ShotResult:
    """Draw ``shots`` joint measurements of ``qubits``.

    ``seed`` may be anything accepted by ``numpy.random.default_rng``.
    """
    qubits = tuple(int(q) for q in qubits)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    _check_operands(qubits, state.num_qubits)
    rng = np.random.default_rng(seed)
    p = state.probabilities()
    p = p / p.sum()
    outcomes = rng.choice(p.size, size=shots, p=p)
    bits = np.stack([(outcomes >> q) & 1 for q in qubits], axis=1).astype(np.uint8)
    return ShotResult(qubits, bits)
