"""Tabular ingestion, standardization statistics, and train/test splits.

Everything downstream (structure search, path fitting, the intervention
engine) works on standardized data; the statistics computed here are the
single source of truth for converting between original and standardized
units.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConstantColumnError, IngestError

__all__ = [
    "Dataset",
    "ColumnStats",
    "Split",
    "IngestConfig",
    "IngestReport",
    "ingest_csv",
    "compute_stats",
    "standardize",
    "unstandardize",
    "split",
]


@dataclass(frozen=True)
class Dataset:
    """An all-numeric table: ``rows`` is (n, p), ``columns`` names the p columns."""

    columns: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "columns", tuple(self.columns))
        if rows.ndim != 2 or rows.shape[1] != len(self.columns):
            raise IngestError(
                f"row matrix of shape {rows.shape} does not match {len(self.columns)} columns"
            )
        if not np.all(np.isfinite(rows)):
            raise IngestError("dataset contains non-finite cells")
        if len(set(self.columns)) != len(self.columns):
            raise IngestError("duplicate column names")
        if any(not c for c in self.columns):
            raise IngestError("empty column name")
        rows.setflags(write=False)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise KeyError(f"unknown column {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.column_index(name)]

    def take(self, indices) -> "Dataset":
        return Dataset(self.columns, self.rows[np.asarray(indices, dtype=int)])


@dataclass(frozen=True)
class ColumnStats:
    """Per-column mean/std (sample, n-1) and observed extrema, in original units."""

    columns: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray
    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        for name in ("mean", "std", "min", "max"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def for_column(self, name: str) -> tuple[float, float, float, float]:
        i = self.columns.index(name)
        return float(self.mean[i]), float(self.std[i]), float(self.min[i]), float(self.max[i])

    def to_standard(self, name: str, value: float) -> float:
        i = self.columns.index(name)
        return (value - float(self.mean[i])) / float(self.std[i])

    def to_original(self, name: str, value: float) -> float:
        i = self.columns.index(name)
        return value * float(self.std[i]) + float(self.mean[i])


@dataclass(frozen=True)
class Split:
    """Disjoint train/test row indices covering the dataset exactly once."""

    train_indices: tuple[int, ...]
    test_indices: tuple[int, ...]
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "train_indices", tuple(int(i) for i in self.train_indices))
        object.__setattr__(self, "test_indices", tuple(int(i) for i in self.test_indices))
        overlap = set(self.train_indices) & set(self.test_indices)
        if overlap:
            raise ValueError(f"train/test overlap: {sorted(overlap)[:5]}")


@dataclass(frozen=True)
class IngestConfig:
    delimiter: str = ","
    on_invalid: str = "drop"  # "drop" rows with bad cells, or "error"


@dataclass
class IngestReport:
    """Row-level diagnostics from ingestion. Row numbers are 1-based data rows."""

    dropped_rows: list[tuple[int, str]] = field(default_factory=list)

    @property
    def n_dropped(self) -> int:
        return len(self.dropped_rows)


def ingest_csv(path: str | Path, config: IngestConfig | None = None) -> tuple[Dataset, IngestReport]:
    """Read a headered CSV into an all-numeric Dataset.

    Rows with missing or non-numeric cells are dropped (and reported) or
    rejected, per ``config.on_invalid``.
    """
    config = config or IngestConfig()
    path = Path(path)
    if not path.exists():
        raise IngestError(f"no such file: {path}")
    report = IngestReport()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=config.delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise IngestError(f"{path}: duplicate column names {dupes}")
        if any(not h for h in header):
            raise IngestError(f"{path}: empty column name in header")
        rows: list[list[float]] = []
        for rownum, record in enumerate(reader, start=1):
            if not record or all(not cell.strip() for cell in record):
                continue  # blank line
            problem = None
            if len(record) != len(header):
                problem = f"expected {len(header)} cells, got {len(record)}"
            else:
                parsed = []
                for name, cell in zip(header, record):
                    cell = cell.strip()
                    if not cell:
                        problem = f"missing value in column {name!r}"
                        break
                    try:
                        value = float(cell)
                    except ValueError:
                        problem = f"non-numeric value {cell!r} in column {name!r}"
                        break
                    if not np.isfinite(value):
                        problem = f"non-finite value {cell!r} in column {name!r}"
                        break
                    parsed.append(value)
            if problem is None:
                rows.append(parsed)
            elif config.on_invalid == "drop":
                report.dropped_rows.append((rownum, problem))
            else:
                raise IngestError(f"{path}: row {rownum}: {problem}")
    if not rows:
        raise IngestError(f"{path}: no usable data rows")
    return Dataset(tuple(header), np.array(rows, dtype=float)), report


def compute_stats(d: Dataset) -> ColumnStats:
    """Sample mean/std (n-1 convention) plus min/max per column.

    Constant columns are rejected: they cannot be standardized and carry no
    signal for path modeling.
    """
    if d.n == 0:
        raise IngestError("empty dataset")
    std = d.rows.std(axis=0, ddof=1) if d.n > 1 else np.zeros(len(d.columns))
    for name, s in zip(d.columns, std):
        if not s > 0:
            raise ConstantColumnError(name)
    return ColumnStats(
        columns=d.columns,
        mean=d.rows.mean(axis=0),
        std=std,
        min=d.rows.min(axis=0),
        max=d.rows.max(axis=0),
    )


def standardize(d: Dataset, s: ColumnStats) -> Dataset:
    """Map each cell x to (x - mean) / std using stats aligned by column name."""
    idx = [s.columns.index(c) for c in d.columns]
    mean = s.mean[idx]
    std = s.std[idx]
    return Dataset(d.columns, (d.rows - mean) / std)


def unstandardize(d: Dataset, s: ColumnStats) -> Dataset:
    """Inverse of :func:`standardize`."""
    idx = [s.columns.index(c) for c in d.columns]
    return Dataset(d.columns, d.rows * s.std[idx] + s.mean[idx])


def split(d: Dataset, test_fraction: float, seed: int) -> Split:
    """Deterministic shuffled split; test size is round(n * test_fraction)."""
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(d.n)
    n_test = int(round(d.n * test_fraction))
    n_test = min(max(n_test, 1), d.n - 1)
    return Split(
        train_indices=tuple(int(i) for i in np.sort(perm[n_test:])),
        test_indices=tuple(int(i) for i in np.sort(perm[:n_test])),
        seed=seed,
    )
