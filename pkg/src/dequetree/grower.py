"""Leaf-wise (best-first) tree induction over pre-sorted deques."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .criteria import Criterion
from .dataset import CLASSIFICATION, REGRESSION, Dataset, SortedColumns, presort
from .deques import BranchBuffer, DequeStore, NodeFrame, mark_branches, split_deques
from .split import best_split_for_node

BEST_FIRST = "best-first"
FIFO = "fifo"


@dataclass(frozen=True)
class GrowConfig:
    """Stopping controls.  The root has depth 0.

    ``max_leaves`` is an extension: it caps the leaf count and is the only
    setting under which the frontier order changes the final tree.
    """

    max_depth: int = 32
    min_leaf_samples: int = 1
    max_leaves: int | None = None
    criterion: str = "gini"

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_leaf_samples < 1:
            raise ValueError("min_leaf_samples must be >= 1")
        if self.max_leaves is not None and self.max_leaves < 2:
            raise ValueError("max_leaves must be >= 2 when set")
        Criterion(self.criterion)

    @property
    def task(self) -> str:
        return CLASSIFICATION if Criterion(self.criterion).is_classification else REGRESSION


@dataclass
class Counters:
    """Work done by one grow run."""

    sort_calls: int = 0
    boundary_evals: int = 0
    element_moves: int = 0
    nodes_split: int = 0


@dataclass
class Tree:
    """Flat node pool.  ``feature[i] == -1`` marks a leaf.

    Internal nodes route ``row[feature] <= threshold`` to ``left``.  Leaves
    carry ``value``: a class id for classification, the mean label for
    regression.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray
    depths: np.ndarray
    task: str
    n_features: int
    n_classes: int = 0
    config: GrowConfig = field(default_factory=GrowConfig)
    # filled by grow(): which nodes ran a split search, and each training
    # row's leaf; neither is persisted
    searched: np.ndarray | None = None
    training_leaf: np.ndarray | None = None

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.feature < 0))

    @property
    def depth(self) -> int:
        return int(self.depths.max()) if self.n_nodes else 0

    def is_leaf(self, node: int) -> bool:
        return self.feature[node] < 0

    def apply(self, X) -> np.ndarray:
        """Leaf id reached by each row of ``X`` (shape ``(n, n_features)``)."""
        X = self._check_rows(X)
        return _route(X, self.feature, self.threshold, self.left, self.right)

    def predict(self, X) -> np.ndarray:
        out = self.value[self.apply(X)]
        return out.astype(np.int64) if self.task == CLASSIFICATION else out

    def _check_rows(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float32)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        if not np.isfinite(X).all():
            raise ValueError("feature values must be finite")
        return X


@numba.njit(cache=True)
def _route(X, feature, threshold, left, right):
    out = np.empty(X.shape[0], dtype=np.int64)
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


def predict(tree: Tree, row):
    """Prediction for one row: walk from the root, left iff value <= threshold."""
    row = [float(v) for v in row]
    if len(row) != tree.n_features:
        raise ValueError(f"expected {tree.n_features} features, got {len(row)}")
    if not all(math.isfinite(v) for v in row):
        raise ValueError("feature values must be finite")
    node = 0
    while tree.feature[node] >= 0:
        value = float(np.float32(row[tree.feature[node]]))
        node = tree.left[node] if value <= tree.threshold[node] else tree.right[node]
    v = tree.value[node]
    return int(v) if tree.task == CLASSIFICATION else float(v)


class TreeBuilder:
    """Accumulates nodes in creation order, then freezes them into a Tree."""

    def __init__(self):
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.value = []
        self.n_samples = []
        self.depths = []
        self.searched = []

    def add(self, depth: int, n: int) -> int:
        self.feature.append(-1)
        self.threshold.append(math.nan)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(math.nan)
        self.n_samples.append(n)
        self.depths.append(depth)
        self.searched.append(False)
        return len(self.feature) - 1

    def set_split(self, node, feature, threshold, left, right):
        self.feature[node] = feature
        self.threshold[node] = threshold
        self.left[node] = left
        self.right[node] = right

    def set_leaf(self, node, value):
        self.value[node] = value

    def build(self, task, n_features, n_classes, config) -> Tree:
        return Tree(
            feature=np.array(self.feature, dtype=np.int64),
            threshold=np.array(self.threshold, dtype=np.float64),
            left=np.array(self.left, dtype=np.int64),
            right=np.array(self.right, dtype=np.int64),
            value=np.array(self.value, dtype=np.float64),
            n_samples=np.array(self.n_samples, dtype=np.int64),
            depths=np.array(self.depths, dtype=np.int64),
            task=task,
            n_features=n_features,
            n_classes=n_classes,
            config=config,
            searched=np.array(self.searched, dtype=bool),
        )


def leaf_value(criterion: Criterion, stats: np.ndarray) -> float:
    """Majority class (lowest id on ties) or mean label."""
    if criterion.is_classification:
        return float(np.argmax(stats))
    return float(stats[1] / stats[0])


def check_task(ds: Dataset, cfg: GrowConfig) -> Criterion:
    criterion = Criterion(cfg.criterion)
    if ds.n_rows < 1:
        raise ValueError("cannot grow a tree on an empty dataset")
    if ds.n_features < 1:
        raise ValueError("dataset has no features")
    if criterion.is_classification != (ds.task == CLASSIFICATION):
        raise ValueError(f"criterion {criterion.value!r} does not fit a {ds.task} dataset")
    return criterion


def grow(
    ds: Dataset,
    cfg: GrowConfig,
    sorted_cols: SortedColumns | None = None,
    order: str = BEST_FIRST,
) -> tuple[Tree, Counters]:
    """Grow one tree leaf by leaf.

    Pass ``sorted_cols`` to reuse a pre-sort computed (and timed) elsewhere.
    ``order`` picks the frontier discipline: highest cached gain first with
    FIFO among equal gains, or plain FIFO.
    """
    criterion = check_task(ds, cfg)
    if order not in (BEST_FIRST, FIFO):
        raise ValueError(f"unknown frontier order {order!r}")
    counters = Counters()
    if sorted_cols is None:
        sorted_cols = presort(ds)
    counters.sort_calls += sorted_cols.sort_calls

    store = DequeStore(ds, sorted_cols, criterion)
    buf = BranchBuffer(ds.n_rows)
    builder = TreeBuilder()
    training_leaf = np.full(ds.n_rows, -1, dtype=np.int64)
    min_leaf = cfg.min_leaf_samples
    frontier = []
    seq = 0

    def finalize(frame: NodeFrame):
        builder.set_leaf(frame.node_id, leaf_value(criterion, frame.label_stats))
        training_leaf[frame.deque(0)] = frame.node_id

    def admit(frame: NodeFrame):
        nonlocal seq
        frame.node_id = builder.add(frame.depth, frame.n)
        if frame.depth < cfg.max_depth and frame.n >= 2 * min_leaf:
            builder.searched[frame.node_id] = True
            frame.best = best_split_for_node(frame, criterion, min_leaf, counters)
        if frame.best is None:
            finalize(frame)
            return
        key = (-frame.best.gain, seq) if order == BEST_FIRST else (seq,)
        heapq.heappush(frontier, (*key, frame))
        seq += 1

    admit(store.root_frame())
    n_leaves = 1
    while frontier:
        frame = heapq.heappop(frontier)[-1]
        if cfg.max_leaves is not None and n_leaves >= cfg.max_leaves:
            finalize(frame)
            continue
        split = frame.best
        node = frame.node_id
        mark_branches(frame, split, buf)
        left, right = split_deques(frame, buf, counters)
        counters.nodes_split += 1
        n_leaves += 1
        admit(left)
        admit(right)
        builder.set_split(node, split.feature, split.threshold, left.node_id, right.node_id)

    tree = builder.build(ds.task, ds.n_features, ds.n_classes, cfg)
    tree.training_leaf = training_leaf
    return tree, counters


@dataclass(frozen=True)
class LeafReport:
    n_leaves: int
    depth: int
    leaf_sizes: tuple[int, ...]

    def as_row(self) -> dict:
        return {"n_leaves": self.n_leaves, "depth": self.depth}


def leaf_report(tree: Tree) -> LeafReport:
    leaves = np.flatnonzero(tree.feature < 0)
    return LeafReport(tree.n_leaves, tree.depth, tuple(int(s) for s in tree.n_samples[leaves]))
