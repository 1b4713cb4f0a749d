"""SWAP-test similarity between the discriminator register and a second register.

The circuit is H(ancilla), one CSWAP per register position, H(ancilla).  The
ancilla reads 1 with probability ``1/2 - |<w|x>|^2 / 2``, so the normalized
value ``|E - 0.5| / 0.5`` is the squared overlap regardless of which ancilla
outcome is taken as "similar".
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import ParamCircuit, ParamGate, run_amplitudes
from .statevector import StateVector, prob_one, sample, zero_state


@dataclass(frozen=True)
class QubitLayout:
    ancilla: int
    disc_qubits: tuple[int, ...]
    other_qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "disc_qubits", tuple(int(q) for q in self.disc_qubits))
        object.__setattr__(self, "other_qubits", tuple(int(q) for q in self.other_qubits))
        if len(self.disc_qubits) != len(self.other_qubits) or not self.disc_qubits:
            raise ValueError("discriminator and generator/data registers must be equal and non-empty")
        everything = (self.ancilla, *self.disc_qubits, *self.other_qubits)
        if len(set(everything)) != len(everything):
            raise ValueError(f"qubit groups overlap: {everything}")
        if sorted(everything) != list(range(len(everything))):
            raise ValueError(f"layout must use qubits 0..{len(everything) - 1} exactly once")

    @classmethod
    def for_dim(cls, dim: int) -> "QubitLayout":
        """Ancilla 0, discriminator 1..d, generator/data d+1..2d."""
        return cls(0, tuple(range(1, dim + 1)), tuple(range(dim + 1, 2 * dim + 1)))

    @property
    def dim(self) -> int:
        return len(self.disc_qubits)

    @property
    def num_qubits(self) -> int:
        return 1 + 2 * self.dim


@dataclass(frozen=True)
class SwapTestOutcome:
    expectation: float
    p_value: float
    shots: int | None = None  # None means exact


def p_value_from_expectation(expectation: float) -> float:
    return abs((expectation - 0.5) / 0.5)


@lru_cache(maxsize=None)
def build_swap_test(layout: QubitLayout) -> ParamCircuit:
    a = layout.ancilla
    gates = [ParamGate("H", (a,))]
    gates += [ParamGate("CSWAP", (a, d, o)) for d, o in zip(layout.disc_qubits, layout.other_qubits)]
    gates.append(ParamGate("H", (a,)))
    return ParamCircuit(layout.num_qubits, tuple(gates), 0)


def _check_prep(circuit: ParamCircuit, allowed, layout: QubitLayout, name: str) -> None:
    if circuit.num_qubits != layout.num_qubits:
        raise ValueError(f"{name} preparation is sized for {circuit.num_qubits} qubits, layout has {layout.num_qubits}")
    foreign = circuit.qubits_used - set(allowed)
    if foreign:
        raise ValueError(f"{name} preparation touches qubits {sorted(foreign)} outside {list(allowed)}")


def swap_test_state(disc_circuit, disc_params, other_circuit, other_params, layout: QubitLayout) -> StateVector:
    """Full register state just before the ancilla is measured."""
    _check_prep(disc_circuit, layout.disc_qubits, layout, "discriminator")
    _check_prep(other_circuit, layout.other_qubits, layout, "generator/data")
    amps = zero_state(layout.num_qubits).amplitudes
    amps = run_amplitudes(disc_circuit, disc_params, amps)
    amps = run_amplitudes(other_circuit, other_params, amps)
    amps = run_amplitudes(build_swap_test(layout), (), amps)
    return StateVector(layout.num_qubits, amps)


def p_value_exact(disc_circuit, disc_params, other_circuit, other_params, layout: QubitLayout) -> SwapTestOutcome:
    state = swap_test_state(disc_circuit, disc_params, other_circuit, other_params, layout)
    e = prob_one(state, layout.ancilla)
    return SwapTestOutcome(e, min(1.0, p_value_from_expectation(e)))


def p_value_shots(
    disc_circuit, disc_params, other_circuit, other_params, layout: QubitLayout, shots: int, seed
) -> SwapTestOutcome:
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    state = swap_test_state(disc_circuit, disc_params, other_circuit, other_params, layout)
    e = float(np.mean(sample(state, [layout.ancilla], shots, seed).bits))
    return SwapTestOutcome(e, p_value_from_expectation(e), shots)
