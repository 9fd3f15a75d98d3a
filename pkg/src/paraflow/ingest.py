"""Dataset loading, cleaning and z-score standardization.

All operations are pure: they return new objects and never permute rows,
since the row index doubles as the capture-order time axis downstream.
"""

from __future__ import annotations

import csv
from array import array
from dataclasses import dataclass
from pathlib import Path

import numpy as np

CONSTANT_COLUMN_TOL = 1e-12


@dataclass(frozen=True)
class LabeledDataset:
    """Numeric sample x feature matrix in capture order with binary labels."""

    matrix: np.ndarray
    labels: np.ndarray
    column_names: tuple[str, ...]
    name: str

    def __post_init__(self):
        if self.matrix.ndim != 2:
            raise ValueError("matrix must be 2-D")
        if self.labels.shape[0] != self.matrix.shape[0]:
            raise ValueError("labels length must equal the number of rows")
        if len(self.column_names) != self.matrix.shape[1]:
            raise ValueError("column_names length must equal the number of columns")

    @property
    def n_samples(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_features(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class StandardizationParams:
    """Per-column mean and population std, with near-constant columns flagged."""

    means: np.ndarray
    stds: np.ndarray
    constant_columns: frozenset[int]


def _parse_cell(cell: str) -> float | None:
    """Float value of a cell, NaN for empty, None if non-numeric."""
    cell = cell.strip()
    if not cell:
        return float("nan")
    try:
        return float(cell)
    except ValueError:
        return None


def load_csv(path, label_column: str, positive_values: set[str],
             name: str | None = None) -> LabeledDataset:
    """Load a header-first CSV, keeping only fully numeric feature columns.

    A column is numeric iff every non-empty cell parses as a real number
    (inf/NaN tokens included). The label column is excluded from the
    matrix and mapped to 1 where its stripped string is in
    ``positive_values``, else 0.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected a header row") from None
        if label_column not in header:
            raise ValueError(f"{path}: label column {label_column!r} not in header")
        label_idx = header.index(label_column)
        n_cols = len(header)
        numeric = [True] * n_cols
        numeric[label_idx] = False
        columns: list[array | None] = [
            array("d") if numeric[c] else None for c in range(n_cols)
        ]
        labels: list[int] = []
        positive = {v.strip() for v in positive_values}
        n_rows = 0
        for row_no, row in enumerate(reader, start=2):
            if len(row) != n_cols:
                raise ValueError(
                    f"{path}: row {row_no} has {len(row)} cells, expected {n_cols}"
                )
            labels.append(1 if row[label_idx].strip() in positive else 0)
            for c in range(n_cols):
                if not numeric[c]:
                    continue
                value = _parse_cell(row[c])
                if value is None:
                    numeric[c] = False
                    columns[c] = None
                else:
                    columns[c].append(value)
            n_rows += 1
    if n_rows == 0:
        raise ValueError(f"{path}: no data rows")
    kept = [c for c in range(n_cols) if numeric[c]]
    if not kept:
        raise ValueError(f"{path}: no numeric feature columns after dropping")
    matrix = np.empty((n_rows, len(kept)), dtype=np.float64)
    for out_c, c in enumerate(kept):
        matrix[:, out_c] = np.frombuffer(columns[c], dtype=np.float64)
    return LabeledDataset(
        matrix=matrix,
        labels=np.asarray(labels, dtype=np.int64),
        column_names=tuple(header[c] for c in kept),
        name=name if name is not None else path.stem,
    )


def _parse_sidecar(path: Path) -> dict[str, str]:
    entries: dict[str, str] = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        for sep in ("=", ":"):
            if sep in line:
                key, _, value = line.partition(sep)
                entries[key.strip().lower()] = value.strip()
                break
        else:
            raise ValueError(f"{path}: malformed sidecar line {raw!r}")
    return entries


def load_binary(path, sidecar, name: str | None = None) -> LabeledDataset:
    """Load a raw little-endian float32 row-major matrix described by a sidecar.

    The sidecar is a key-value text file with keys ``dtype`` (must be
    float32), ``shape`` (n, p) and ``labels`` (inline comma list of 0/1
    or a path, relative to the sidecar, to a one-label-per-line file).
    """
    path = Path(path)
    sidecar = Path(sidecar)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    if not sidecar.is_file():
        raise FileNotFoundError(f"no such sidecar: {sidecar}")
    meta = _parse_sidecar(sidecar)
    for key in ("dtype", "shape", "labels"):
        if key not in meta:
            raise ValueError(f"{sidecar}: missing sidecar key {key!r}")
    dtype = meta["dtype"].lower()
    if dtype not in ("float32", "<f4", "f4"):
        raise ValueError(f"{sidecar}: unsupported dtype {meta['dtype']!r}")
    shape_text = meta["shape"].strip("[]() ")
    try:
        n, p = (int(tok) for tok in shape_text.split(","))
    except ValueError:
        raise ValueError(f"{sidecar}: shape must be two integers, got {meta['shape']!r}") from None
    if n <= 0 or p <= 0:
        raise ValueError(f"{sidecar}: shape entries must be positive")
    blob = path.read_bytes()
    expected = n * p * 4
    if len(blob) != expected:
        raise ValueError(
            f"{path}: byte length {len(blob)} does not match shape "
            f"[{n}, {p}] (expected {expected})"
        )
    matrix = np.frombuffer(blob, dtype="<f4").astype(np.float64).reshape(n, p)
    labels_field = meta["labels"]
    if "," in labels_field or labels_field.isdigit():
        labels = np.asarray(
            [int(tok) for tok in labels_field.split(",")], dtype=np.int64
        )
    else:
        label_path = (sidecar.parent / labels_field).resolve()
        if not label_path.is_file():
            raise FileNotFoundError(f"no such label file: {label_path}")
        labels = np.asarray(
            [int(tok) for tok in label_path.read_text().split()], dtype=np.int64
        )
    if labels.shape[0] != n:
        raise ValueError(f"{sidecar}: {labels.shape[0]} labels for {n} rows")
    if not np.isin(labels, (0, 1)).all():
        raise ValueError(f"{sidecar}: labels must be 0 or 1")
    return LabeledDataset(
        matrix=matrix,
        labels=labels,
        column_names=tuple(f"x{j}" for j in range(p)),
        name=name if name is not None else path.stem,
    )


def clean(dataset: LabeledDataset) -> LabeledDataset:
    """Replace every NaN and +-inf entry with exactly 0.0."""
    matrix = np.where(np.isfinite(dataset.matrix), dataset.matrix, 0.0)
    return LabeledDataset(
        matrix=matrix,
        labels=dataset.labels,
        column_names=dataset.column_names,
        name=dataset.name,
    )


def fit_standardizer(matrix: np.ndarray) -> StandardizationParams:
    """Column means and population stds; stds below tolerance flag the column."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError("matrix must be 2-D")
    if matrix.shape[0] < 2:
        raise ValueError("need at least 2 rows to fit a standardizer")
    if not np.isfinite(matrix).all():
        raise ValueError("matrix must be finite; run clean() first")
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0)
    constant = frozenset(int(c) for c in np.nonzero(stds < CONSTANT_COLUMN_TOL)[0])
    return StandardizationParams(means=means, stds=stds, constant_columns=constant)


def apply_standardizer(matrix: np.ndarray, params: StandardizationParams) -> np.ndarray:
    """(x - mean) / std per column; constant columns map to all zeros."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] != params.means.shape[0]:
        raise ValueError(
            f"matrix has {matrix.shape[1] if matrix.ndim == 2 else '?'} columns, "
            f"params expect {params.means.shape[0]}"
        )
    out = matrix - params.means
    const = sorted(params.constant_columns)
    divisors = params.stds.copy()
    if const:
        divisors[const] = 1.0
    out /= divisors
    if const:
        out[:, const] = 0.0
    return out


def invert_standardizer(matrix: np.ndarray, params: StandardizationParams) -> np.ndarray:
    """Undo apply_standardizer; constant columns restore to their mean."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] != params.means.shape[0]:
        raise ValueError("column count does not match params")
    multipliers = params.stds.copy()
    const = sorted(params.constant_columns)
    if const:
        multipliers[const] = 0.0
    return matrix * multipliers + params.means
