"""Tabular data: loading, subsampling and the one-time pre-sort.

Features are held column-major as 32-bit floats, one contiguous array per
feature, so a scan in sorted order only touches one column.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numba
import numpy as np

CLASSIFICATION = "classification"
REGRESSION = "regression"
TASKS = (CLASSIFICATION, REGRESSION)

_F32_MAX = float(np.finfo(np.float32).max)


class DataError(ValueError):
    """Raised when input data cannot be turned into a valid Dataset."""


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix plus labels.

    ``columns`` has shape ``(n_features, n_rows)``; row ``i`` of the logical
    table is ``columns[:, i]``.  Classification labels are ``int64`` class ids,
    regression labels are ``float64``.
    """

    columns: np.ndarray
    labels: np.ndarray
    task: str = CLASSIFICATION
    n_classes: int = field(default=0)

    def __post_init__(self):
        if self.task not in TASKS:
            raise DataError(f"unknown task {self.task!r}")
        cols = np.ascontiguousarray(self.columns, dtype=np.float32)
        if cols.ndim != 2:
            raise DataError("columns must be a 2-d array (n_features, n_rows)")
        if self.task == CLASSIFICATION:
            labels = np.ascontiguousarray(self.labels, dtype=np.int64)
            if labels.size and labels.min() < 0:
                raise DataError("classification labels must be non-negative")
            n_classes = int(labels.max()) + 1 if labels.size else 0
        else:
            labels = np.ascontiguousarray(self.labels, dtype=np.float64)
            n_classes = 0
        if labels.shape != (cols.shape[1],):
            raise DataError(
                f"expected {cols.shape[1]} labels, got {labels.shape[0]}"
            )
        if not np.isfinite(cols).all():
            raise DataError("feature values must be finite")
        cols.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_classes", max(self.n_classes, n_classes))

    @classmethod
    def from_rows(cls, X, y, task: str = CLASSIFICATION) -> "Dataset":
        """Build from a row-major ``(n_rows, n_features)`` matrix."""
        X = np.asarray(X, dtype=np.float32)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        return cls(np.ascontiguousarray(X.T), np.asarray(y), task)

    @property
    def n_rows(self) -> int:
        return self.columns.shape[1]

    @property
    def n_features(self) -> int:
        return self.columns.shape[0]

    def rows(self) -> np.ndarray:
        """Row-major copy of the features, shape ``(n_rows, n_features)``."""
        return np.ascontiguousarray(self.columns.T)

    def take(self, rows: np.ndarray) -> "Dataset":
        return Dataset(self.columns[:, rows], self.labels[rows], self.task)


@dataclass(frozen=True)
class SortedColumns:
    """One index deque per feature, each ordering all rows by that feature.

    ``order[f]`` lists row ids by ascending ``columns[f]``, ties broken by
    ascending row id.  ``sort_calls`` records how many sort routines ran to
    produce it (one per feature).
    """

    order: np.ndarray
    sort_calls: int

    @property
    def n_features(self) -> int:
        return self.order.shape[0]


def presort(ds: Dataset) -> SortedColumns:
    """Sort every feature column once.  The only sort in the training path."""
    order = np.empty((ds.n_features, ds.n_rows), dtype=np.int32)
    calls = 0
    for f in range(ds.n_features):
        # stable sort on equal keys keeps ascending row id
        order[f] = np.argsort(ds.columns[f], kind="stable")
        calls += 1
    order.setflags(write=False)
    return SortedColumns(order, calls)


# -- deterministic subsampling ------------------------------------------------
#
# xorshift64* (Vigna 2014): state ^= state >> 12; state ^= state << 25;
# state ^= state >> 27; output = state * 0x2545F4914F6CDD1D (mod 2**64).
# The seed is expanded with one splitmix64 step so that seed 0 is usable.
# A uniform double is (output >> 11) * 2**-53.

_MASK64 = (1 << 64) - 1
_XS_MULT = 0x2545F4914F6CDD1D


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class XorShift64Star:
    """Reference implementation of the portable subsampling generator."""

    def __init__(self, seed: int):
        self.state = splitmix64(seed & _MASK64) or 1

    def next_u64(self) -> int:
        s = self.state
        s ^= s >> 12
        s ^= (s << 25) & _MASK64
        s ^= s >> 27
        self.state = s
        return (s * _XS_MULT) & _MASK64

    def next_double(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53


@numba.njit(cache=True)
def _selection_sample(n_rows, m, state):
    # Knuth's Algorithm S: one draw per row, output already in row order.
    out = np.empty(m, dtype=np.int64)
    s = np.uint64(state)
    mult = np.uint64(_XS_MULT)
    chosen = 0
    for t in range(n_rows):
        if chosen == m:
            break
        s ^= s >> np.uint64(12)
        s ^= s << np.uint64(25)
        s ^= s >> np.uint64(27)
        u = float((s * mult) >> np.uint64(11)) * 2.0**-53
        if (n_rows - t) * u < m - chosen:
            out[chosen] = t
            chosen += 1
    return out


def subsample_indices(n_rows: int, m: int, seed: int) -> np.ndarray:
    if not 0 < m <= n_rows:
        raise DataError(f"subsample size must be in [1, {n_rows}], got {m}")
    state = XorShift64Star(seed).state
    return _selection_sample(n_rows, m, np.uint64(state))


def subsample(ds: Dataset, m: int, seed: int) -> Dataset:
    """Draw ``m`` distinct rows without replacement, keeping their order."""
    rows = subsample_indices(ds.n_rows, m, seed)
    if m == ds.n_rows:
        return ds
    return ds.take(rows)


# -- loaders -------------------------------------------------------------------


def _resolve_label_column(selector, n_cols: int, header: Sequence[str] | None) -> int:
    if isinstance(selector, str) and not _is_int(selector):
        if header is None or selector not in header:
            raise DataError(f"label column {selector!r} not found in header")
        return list(header).index(selector)
    idx = int(selector)
    if not -n_cols <= idx < n_cols:
        raise DataError(f"label column {idx} out of range for {n_cols} columns")
    return idx % n_cols


def _is_int(s: str) -> bool:
    try:
        int(s)
    except ValueError:
        return False
    return True


def _parse_label(text: str, task: str, where: str):
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"cannot parse label {text!r} at {where}") from None
    if not math.isfinite(value):
        raise DataError(f"non-finite label at {where}")
    if task == CLASSIFICATION:
        if value < 0 or value != int(value):
            raise DataError(
                f"classification label {text!r} at {where} is not a non-negative integer"
            )
        return int(value)
    return value


def _check_cell(text: str, row: int, col: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(
            f"cannot parse {text.strip()!r} as a number at row {row}, column {col}"
        ) from None
    if not math.isfinite(value):
        raise DataError(f"non-finite value {text.strip()!r} at row {row}, column {col}")
    return value


@dataclass(frozen=True)
class CsvTable:
    values: np.ndarray  # (n_rows, n_cols) float64
    header: list | None
    first_row: int  # file line number of values[0], 1-based


def read_csv_table(path, has_header: bool = False) -> CsvTable:
    """Parse a numeric CSV file.  Zero data rows gives a ``(0, 0)`` table.

    Errors name the 1-based file row and 0-based column of the bad cell.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    first_row = 2 if has_header else 1
    header = None
    with path.open(newline="") as fh:
        if has_header:
            header = [h.strip() for h in next(csv.reader(fh), [])]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            values = np.loadtxt(
                path, delimiter=",", skiprows=int(has_header), ndmin=2, dtype=np.float64
            )
        if np.isfinite(values).all():
            if values.size == 0:
                values = np.empty((0, 0))
            return CsvTable(values, header, first_row)
    except ValueError:
        pass

    # slow path: locate the offending cell
    records = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        if has_header:
            next(reader, None)
        for lineno, record in enumerate(reader, start=first_row):
            if not record or all(not c.strip() for c in record):
                continue
            if records and len(record) != len(records[0]):
                raise DataError(
                    f"row {lineno} has {len(record)} columns, expected {len(records[0])}"
                )
            records.append([_check_cell(c, lineno, j) for j, c in enumerate(record)])
    if not records:
        return CsvTable(np.empty((0, 0)), header, first_row)
    return CsvTable(np.asarray(records, dtype=np.float64), header, first_row)


def _check_features(X: np.ndarray, first_row: int, feature_idx) -> None:
    bad = np.abs(X) > _F32_MAX
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise DataError(
            f"value out of 32-bit float range at row {i + first_row}, column {feature_idx[j]}"
        )


def _check_labels(y: np.ndarray, task: str, first_row: int, col: int) -> np.ndarray:
    if task == REGRESSION:
        return y
    bad = (y < 0) | (y != np.floor(y))
    if bad.any():
        i = int(np.argmax(bad))
        raise DataError(
            f"classification label {y[i]!r} at row {i + first_row}, column {col} "
            "is not a non-negative integer"
        )
    return y.astype(np.int64)


def split_label_column(table: CsvTable, label_column, task: str):
    """Return ``(X, y)``; ``X`` keeps the file's column order minus the label."""
    n_cols = table.values.shape[1]
    label_idx = _resolve_label_column(label_column, n_cols, table.header)
    feature_idx = [c for c in range(n_cols) if c != label_idx]
    X = table.values[:, feature_idx]
    _check_features(X, table.first_row, feature_idx)
    y = _check_labels(table.values[:, label_idx], task, table.first_row, label_idx)
    return X, y


def load_csv(
    path,
    label_column=-1,
    has_header: bool = False,
    task: str = CLASSIFICATION,
) -> Dataset:
    """Read a comma-separated file into a Dataset.

    ``label_column`` is a 0-based index (negative counts from the end) or a
    header name.  Rows are reported 1-based as they appear in the file.
    """
    if task not in TASKS:
        raise DataError(f"unknown task {task!r}")
    table = read_csv_table(path, has_header)
    if table.values.shape[0] == 0:
        raise DataError(f"{path} contains no data rows")
    if table.values.shape[1] < 2:
        raise DataError("need at least one feature column and one label column")
    X, y = split_label_column(table, label_column, task)
    return Dataset.from_rows(X, y, task)


def load_libsvm(path, task: str = CLASSIFICATION, n_features: int | None = None) -> Dataset:
    """Read libsvm text (``label idx:value ...``, 1-based indices), densified.

    Absent entries become 0.0.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    labels = []
    entries = []
    width = 0
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            labels.append(_parse_label(tokens[0], task, f"line {lineno}"))
            row = []
            for tok in tokens[1:]:
                idx, sep, val = tok.partition(":")
                if not sep or not _is_int(idx) or int(idx) < 1:
                    raise DataError(f"bad libsvm entry {tok!r} on line {lineno}")
                col = int(idx) - 1
                row.append((col, _check_cell(val, lineno, int(idx))))
                width = max(width, col + 1)
            entries.append(row)
    if not labels:
        raise DataError(f"{path} contains no data rows")
    if n_features is not None:
        if width > n_features:
            raise DataError(f"feature index {width} exceeds n_features={n_features}")
        width = n_features
    X = np.zeros((len(labels), width), dtype=np.float64)
    for i, row in enumerate(entries):
        for col, val in row:
            X[i, col] = val
    return Dataset.from_rows(X, np.asarray(labels), task)


def make_synthetic(n_rows: int, n_features: int, seed: int, noise: float = 0.1) -> Dataset:
    """Uniform features on [0, 1) with labels from a fixed threshold rule.

    The label is ``(x0 > 0.5) xor (x1 > 0.3)`` (or ``x0 > 0.5`` when there is
    a single feature), flipped with probability ``noise``.  Noise keeps every
    node impure, so trees keep growing until a stopping control bites.
    """
    if n_rows < 1 or n_features < 1:
        raise DataError("synthetic data needs n_rows >= 1 and n_features >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    X = rng.random((n_features, n_rows), dtype=np.float32)
    y = X[0] > 0.5
    if n_features > 1:
        y = y ^ (X[1] > 0.3)
    flip = rng.random(n_rows) < noise
    return Dataset(X, (y ^ flip).astype(np.int64), CLASSIFICATION)
