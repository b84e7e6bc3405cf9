"""Outcome-radius neighborhoods embedded in a 2-D principal-component plane.

Neighbors are real dataset rows whose recorded outcome lies within a radius
of profile A's current outcome. The PCA basis is fitted on the standardized
feature vectors of exactly those rows (the outcome column is excluded: it is
the color channel, not an embedding feature), and live profiles are
projected into the same plane without refitting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .engine import Profile, initial_profile, predict, set_value
from .errors import MapError
from .sem import FittedModel

__all__ = ["NeighborMap", "MapPoint", "neighbors", "embed", "project", "pick", "build_map"]


@dataclass(frozen=True)
class MapPoint:
    x: float
    y: float
    outcome: float  # original units, as recorded in the dataset
    row: int


@dataclass(frozen=True)
class NeighborMap:
    feature_columns: tuple[str, ...]
    basis: np.ndarray        # (2, n_features), rows orthonormal
    center: np.ndarray       # mean of the neighbors' standardized features
    explained_variance: tuple[float, float]
    points: tuple[MapPoint, ...]
    radius: float

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        center = np.asarray(self.center, dtype=float)
        basis.setflags(write=False)
        center.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "feature_columns", tuple(self.feature_columns))
        object.__setattr__(self, "points", tuple(self.points))

    def row_indices(self) -> frozenset[int]:
        return frozenset(p.row for p in self.points)


def neighbors(d: Dataset, m: FittedModel, profile_a: Profile, radius: float) -> list[int]:
    """Rows whose recorded outcome is within +-radius of profile A's outcome."""
    if radius < 0:
        raise MapError(f"radius must be >= 0, got {radius}")
    center = predict(m, profile_a).outcome
    outcomes = d.column(m.dag.outcome)
    return [int(i) for i in np.flatnonzero(np.abs(outcomes - center) <= radius)]


def _standardized_features(d: Dataset, m: FittedModel, rows: np.ndarray | list[int],
                           feature_columns: tuple[str, ...]) -> np.ndarray:
    cols = []
    for name in feature_columns:
        mean, std, _, _ = m.stats.for_column(name)
        cols.append((d.column(name)[np.asarray(rows, dtype=int)] - mean) / std)
    return np.column_stack(cols)


def embed(d: Dataset, m: FittedModel, rows: list[int], radius: float) -> NeighborMap:
    """Fit the 2-D PCA plane on the selected rows and place them in it.

    The eigenvector sign convention (largest-magnitude loading positive)
    makes repeated fits reproducible.
    """
    if len(rows) < 3:
        raise MapError(
            f"only {len(rows)} neighbors selected; increase the radius (need at least 3)"
        )
    feature_columns = tuple(c for c in d.columns if c != m.dag.outcome and c in m.dag.nodes)
    Z = _standardized_features(d, m, rows, feature_columns)
    center = Z.mean(axis=0)
    centered = Z - center
    cov = centered.T @ centered / (len(rows) - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:2]
    basis = []
    variances = []
    for j in order:
        vec = eigvecs[:, j]
        lead = np.argmax(np.abs(vec))
        if vec[lead] < 0:
            vec = -vec
        basis.append(vec)
        variances.append(max(float(eigvals[j]), 0.0))
    coords = centered @ np.array(basis).T
    outcomes = d.column(m.dag.outcome)
    points = tuple(
        MapPoint(x=float(coords[i, 0]), y=float(coords[i, 1]),
                 outcome=float(outcomes[row]), row=int(row))
        for i, row in enumerate(rows)
    )
    return NeighborMap(
        feature_columns=feature_columns,
        basis=np.array(basis),
        center=center,
        explained_variance=(variances[0], variances[1]),
        points=points,
        radius=radius,
    )


def project(nmap: NeighborMap, m: FittedModel, p: Profile) -> tuple[float, float]:
    """Project a profile (with endogenous values as currently predicted) on the map."""
    values = predict(m, p).values
    z = np.array([m.stats.to_standard(c, values[c]) for c in nmap.feature_columns])
    coords = nmap.basis @ (z - nmap.center)
    return float(coords[0]), float(coords[1])


def pick(nmap: NeighborMap, d: Dataset, m: FittedModel, row: int,
         profile_id: str = "B") -> Profile:
    """Adopt a map point as a concrete comparison profile.

    All endogenous variables (except the outcome) are pinned to the row's
    observed values: the point is a real instance, not a free model
    evaluation.
    """
    if row not in nmap.row_indices():
        raise MapError(f"row {row} is not on the map")
    profile = initial_profile(m, profile_id)
    for v in m.dag.nodes:
        if v == m.dag.outcome:
            continue
        profile = set_value(m, profile, v, float(d.column(v)[row]))
    return profile


def build_map(d: Dataset, m: FittedModel, profile_a: Profile, radius: float) -> NeighborMap:
    """Convenience: neighbor selection plus embedding in one call."""
    return embed(d, m, neighbors(d, m, profile_a, radius), radius)
