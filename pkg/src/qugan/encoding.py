"""Classical <-> qubit data translation.

A value ``x`` in [0, 1] is loaded as ``RY(2 asin(sqrt(x)))|0>``, whose
probability of reading 1 is exactly ``x``.  Decoding goes the other way:
per-qubit measurement means are mapped back through the min-max scaler.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .circuit import ParamCircuit, ParamGate
from .errors import DataError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Scaler:
    """Per-dimension min-max normalization, frozen after fitting."""

    mins: tuple[float, ...]
    maxs: tuple[float, ...]

    def __post_init__(self):
        mins = tuple(float(v) for v in self.mins)
        maxs = tuple(float(v) for v in self.maxs)
        if len(mins) != len(maxs):
            raise DataError("mins and maxs differ in length")
        for i, (lo, hi) in enumerate(zip(mins, maxs)):
            if not hi > lo:
                raise DataError(f"dimension {i} has no spread (min={lo}, max={hi})")
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @classmethod
    def identity(cls, dim: int) -> "Scaler":
        return cls((0.0,) * dim, (1.0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.mins)

    def transform(self, points, clamp: bool = True) -> np.ndarray:
        """Map data units to [0, 1]; out-of-range values are clamped with a warning."""
        pts = np.asarray(points, dtype=float)
        lo, hi = np.array(self.mins), np.array(self.maxs)
        out = (pts - lo) / (hi - lo)
        if clamp:
            outside = (out < 0) | (out > 1)
            if np.any(outside):
                log.warning("clamping %d value(s) outside the fitted range", int(outside.sum()))
                out = np.clip(out, 0.0, 1.0)
        return out

    def inverse(self, values) -> np.ndarray:
        vals = np.asarray(values, dtype=float)
        lo, hi = np.array(self.mins), np.array(self.maxs)
        return lo + vals * (hi - lo)

    def to_dict(self) -> dict:
        return {"mins": list(self.mins), "maxs": list(self.maxs)}

    @classmethod
    def from_dict(cls, d: dict) -> "Scaler":
        return cls(tuple(d["mins"]), tuple(d["maxs"]))


def fit_scaler(points) -> Scaler:
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise DataError("cannot fit a scaler on an empty dataset")
    if pts.ndim == 1:
        pts = pts[:, None]
    return Scaler(tuple(pts.min(axis=0)), tuple(pts.max(axis=0)))


def encode_point(x) -> np.ndarray:
    """Rotation angles ``2 asin(sqrt(x_i))``, each in [0, pi]."""
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
        raise ValueError(f"coordinates must lie in [0, 1], got {x}")
    return 2.0 * np.arcsin(np.sqrt(x))


def expected_ones(angles) -> np.ndarray:
    """Exact probability of reading 1 after ``RY(angle)|0>``."""
    return np.sin(np.asarray(angles, dtype=float) / 2.0) ** 2


def decode_measurements(shot_means, scaler: Scaler) -> np.ndarray:
    means = np.asarray(shot_means, dtype=float)
    if np.any(means < 0) or np.any(means > 1):
        raise ValueError("measurement means must lie in [0, 1]")
    return scaler.inverse(means)


def loading_circuit(qubits, num_qubits: int) -> ParamCircuit:
    """One RY per qubit; bind it with :func:`encode_point` angles."""
    gates = tuple(ParamGate("RY", (q,), param=i) for i, q in enumerate(qubits))
    return ParamCircuit(num_qubits, gates, len(gates))
