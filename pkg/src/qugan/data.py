"""Datasets: the clipped bivariate normal and 2D embeddings read from CSV."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import erf, inf, sqrt
from pathlib import Path

import numpy as np

from .errors import DataError
from .metrics import DEFAULT_BINS, Histogram2D


@dataclass(frozen=True)
class BivariateParams:
    means: tuple[float, float] = (0.65, 0.45)
    stds: tuple[float, float] = (0.10, 0.05)

    def __post_init__(self):
        object.__setattr__(self, "means", tuple(float(m) for m in self.means))
        object.__setattr__(self, "stds", tuple(float(s) for s in self.stds))
        if len(self.means) != len(self.stds):
            raise ValueError("means and stds differ in length")
        if any(not s > 0 for s in self.stds):
            raise ValueError(f"standard deviations must be positive, got {self.stds}")


DEFAULT_BIVARIATE = BivariateParams()


def sample_bivariate(params: BivariateParams, count: int, seed) -> np.ndarray:
    """Independent normal draws per dimension, clipped to [0, 1].

    Draws come from numpy's ``Generator.normal`` (ziggurat), seeded with
    ``default_rng(seed)``; dimension 0 is drawn for all points first.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    cols = [rng.normal(m, s, count) for m, s in zip(params.means, params.stds)]
    return np.clip(np.column_stack(cols), 0.0, 1.0)


def _normal_cdf(x: float, mu: float, sigma: float) -> float:
    if x == inf:
        return 1.0
    if x == -inf:
        return 0.0
    return 0.5 * (1.0 + erf((x - mu) / (sigma * sqrt(2.0))))


def clipped_cell_masses(mu: float, sigma: float, bins: int) -> np.ndarray:
    """Per-bin probability of a normal clipped to [0, 1].

    Mass below 0 lands in the first bin and mass above 1 in the last, which is
    where clipping puts it.
    """
    edges = [-inf] + [i / bins for i in range(1, bins)] + [inf]
    cdf = [_normal_cdf(e, mu, sigma) for e in edges]
    return np.diff(cdf)


def bivariate_histogram(params: BivariateParams = DEFAULT_BIVARIATE, bins: int = DEFAULT_BINS) -> Histogram2D:
    """Exact cell masses of the clipped bivariate distribution."""
    px = clipped_cell_masses(params.means[0], params.stds[0], bins)
    py = clipped_cell_masses(params.means[1], params.stds[1], bins)
    return Histogram2D(np.outer(px, py))


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    points: np.ndarray = field(repr=False)
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = tuple(str(lab) for lab in self.labels)
            if len(labels) != len(pts):
                raise DataError(f"{len(labels)} labels for {len(pts)} points")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.points)


def _is_header(row: list[str]) -> bool:
    try:
        float(row[0])
    except ValueError:
        return True
    return False


def load_csv(path, class_filter=None) -> LabeledDataset:
    """Read ``x,y[,label]`` rows; keep only labels in ``class_filter`` if given.

    A first row whose first field is not a number is treated as a header.
    """
    path = Path(path)
    wanted = None if class_filter is None else {str(c).strip() for c in class_filter}
    points, labels = [], []
    any_label = None
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or all(not c.strip() for c in row):
                continue
            if lineno == 1 and _is_header(row):
                continue
            if len(row) not in (2, 3):
                raise DataError(f"{path}:{lineno}: expected 2 or 3 columns, got {len(row)}")
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric coordinate in {row!r}") from None
            has_label = len(row) == 3
            if any_label is None:
                any_label = has_label
            elif any_label != has_label:
                raise DataError(f"{path}:{lineno}: inconsistent column count")
            label = row[2].strip() if has_label else None
            if wanted is not None:
                if label is None:
                    raise DataError(f"{path}:{lineno}: class filter given but row has no label")
                if label not in wanted:
                    continue
            points.append((x, y))
            labels.append(label)
    return LabeledDataset(
        np.array(points, dtype=float).reshape(-1, 2),
        tuple(labels) if any_label else None,
    )


def format_float(v: float) -> str:
    return f"{float(v):.17g}"


def write_points_csv(path_or_file, points, labels=None, header=("x", "y")) -> None:
    """Write points with 17 significant digits (round-trips exactly)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
    try:
        cols = list(header) + (["label"] if labels is not None else [])
        fh.write(",".join(cols) + "\n")
        for i, (x, y) in enumerate(pts):
            row = [format_float(x), format_float(y)]
            if labels is not None:
                row.append(str(labels[i]))
            fh.write(",".join(row) + "\n")
    finally:
        if own:
            fh.close()
