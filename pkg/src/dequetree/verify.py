"""Randomised equivalence check: deque grower against the naive oracle."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import CLASSIFICATION, REGRESSION, Dataset
from .grower import GrowConfig, Tree, grow
from .model_io import dumps
from .oracle import TreeComparison, grow_naive, trees_equal

MAX_DEPTHS = (1, 2, 4, 8)
MIN_LEAVES = (1, 2, 5)
CRITERIA = ("gini", "entropy", "variance")
CONFIG_GRID = [
    GrowConfig(max_depth=d, min_leaf_samples=m, criterion=c)
    for d, m, c in itertools.product(MAX_DEPTHS, MIN_LEAVES, CRITERIA)
]
THRESHOLD_TOL = 1e-9


def duplicate_fraction(column: np.ndarray) -> float:
    """Share of cells whose value also appears in another cell of the column."""
    if column.size == 0:
        return 0.0
    return 1.0 - np.unique(column).size / column.size


def random_instance(
    rng: np.random.Generator, criterion: str, max_rows: int = 200, max_features: int = 5
) -> Dataset:
    """Small dataset with at least 30% duplicated values in every feature.

    Feature values are drawn from a pool no larger than 70% of the row
    count.  Regression labels are multiples of 0.5 below 10, so label sums
    are exact in double precision and both growers see identical statistics.
    """
    n = int(rng.integers(2, max_rows + 1))
    k = int(rng.integers(1, max_features + 1))
    X = np.empty((n, k), dtype=np.float32)
    for f in range(k):
        pool_size = max(1, int(n * rng.uniform(0.1, 0.7)))
        pool = np.round(rng.normal(0.0, 10.0, pool_size) * 4) / 4
        X[:, f] = rng.choice(pool, n)
    signal = X[:, 0] > np.median(X[:, 0])
    if criterion == "variance":
        y = rng.integers(0, 20, n) / 2.0
        y = np.where(signal & (rng.random(n) < 0.6), y / 2.0 + 5.0, y)
        y = np.round(y * 2) / 2
        return Dataset.from_rows(X, y, REGRESSION)
    n_classes = int(rng.integers(2, 5))
    y = rng.integers(0, n_classes, n)
    y = np.where(signal & (rng.random(n) < 0.5), 0, y)
    return Dataset.from_rows(X, y, CLASSIFICATION)


@dataclass
class Trial:
    index: int
    dataset: Dataset
    config: GrowConfig
    fast: Tree
    naive: Tree
    comparison: TreeComparison


@dataclass
class VerifyReport:
    trials: int
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _perturb(tree: Tree) -> None:
    internal = np.flatnonzero(tree.feature >= 0)
    if internal.size:
        i = internal[0]
        tree.threshold[i] = np.nextafter(tree.threshold[i], np.inf)
    else:
        tree.value[0] = np.nextafter(tree.value[0], np.inf)


def run_trials(
    trials: int,
    seed: int,
    max_rows: int = 200,
    max_features: int = 5,
    inject_fault: bool = False,
):
    """Yield one :class:`Trial` per instance, cycling through the config grid.

    With ``inject_fault`` the oracle's tree gets one threshold nudged by an
    ulp and trees are compared with zero tolerance, which must fail.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    tol = 0.0 if inject_fault else THRESHOLD_TOL
    for i in range(trials):
        cfg = CONFIG_GRID[i % len(CONFIG_GRID)]
        ds = random_instance(rng, cfg.criterion, max_rows, max_features)
        fast, _ = grow(ds, cfg)
        naive = grow_naive(ds, cfg)
        if inject_fault:
            _perturb(naive)
        yield Trial(i, ds, cfg, fast, naive, trees_equal(fast, naive, tol))


def verify(trials: int, seed: int, max_rows: int = 200, max_features: int = 5,
           inject_fault: bool = False) -> VerifyReport:
    report = VerifyReport(trials)
    for trial in run_trials(trials, seed, max_rows, max_features, inject_fault):
        if not trial.comparison:
            report.failures.append(trial)
    return report


def dump_failure(trial: Trial, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = directory / f"trial_{trial.index:04d}"
    cfg = trial.config
    payload = {
        "index": trial.index,
        "config": {
            "max_depth": cfg.max_depth,
            "min_leaf_samples": cfg.min_leaf_samples,
            "max_leaves": cfg.max_leaves,
            "criterion": cfg.criterion,
        },
        "task": trial.dataset.task,
        "rows": trial.dataset.rows().tolist(),
        "labels": trial.dataset.labels.tolist(),
        "first_difference": {"path": trial.comparison.path, "detail": trial.comparison.detail},
    }
    stem.with_suffix(".json").write_text(json.dumps(payload, indent=1))
    Path(f"{stem}_fast.model").write_text(dumps(trial.fast))
    Path(f"{stem}_naive.model").write_text(dumps(trial.naive))
    return stem.with_suffix(".json")
