"""2D histograms on the unit square and the Hellinger distance between them."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

DEFAULT_BINS = 16


@dataclass(frozen=True, eq=False)
class Histogram2D:
    """Normalized cell masses over uniform bins on [0,1] x [0,1]."""

    mass: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.mass, dtype=float)
        if m.ndim != 2:
            raise ValueError("histogram mass must be a 2D array")
        if np.any(m < 0):
            raise ValueError("histogram mass must be non-negative")
        total = m.sum()
        if total <= 0:
            raise DataError("histogram has no mass")
        m = m / total
        m.setflags(write=False)
        object.__setattr__(self, "mass", m)

    @property
    def bins_x(self) -> int:
        return self.mass.shape[0]

    @property
    def bins_y(self) -> int:
        return self.mass.shape[1]


def _cell_index(v: np.ndarray, bins: int) -> np.ndarray:
    # 1.0 falls in the last bin
    return np.minimum((v * bins).astype(int), bins - 1)


def histogram(points, bins: int = DEFAULT_BINS) -> Histogram2D:
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise DataError("cannot histogram an empty point set")
    if bins < 2:
        raise ValueError(f"need at least 2 bins per axis, got {bins}")
    pts = pts.reshape(-1, 2)
    if np.any(~np.isfinite(pts)) or np.any(pts < 0) or np.any(pts > 1):
        raise ValueError("histogram points must lie in [0, 1]^2")
    counts = np.zeros((bins, bins))
    np.add.at(counts, (_cell_index(pts[:, 0], bins), _cell_index(pts[:, 1], bins)), 1.0)
    return Histogram2D(counts)


def _as_mass(h) -> np.ndarray:
    if isinstance(h, Histogram2D):
        return h.mass
    m = np.asarray(h, dtype=float)
    return m / m.sum()


def hellinger(p, q) -> float:
    """Hellinger distance sqrt(1 - sum sqrt(p_i q_i)).

    Evaluated as ||sqrt(p) - sqrt(q)||_2 / sqrt(2), which is the same quantity
    for normalized inputs but does not lose precision when p is close to q.
    Accepts :class:`Histogram2D` or plain arrays (normalized on entry).
    """
    a, b = _as_mass(p), _as_mass(q)
    if a.shape != b.shape:
        raise ValueError(f"bin geometry mismatch: {a.shape} vs {b.shape}")
    d = np.sqrt(np.sum((np.sqrt(a) - np.sqrt(b)) ** 2) / 2.0)
    return float(min(d, 1.0))
