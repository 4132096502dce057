"""Naive leaf-wise tree induction used as a correctness oracle.

Each node keeps a plain list of its rows, re-sorts them per feature, and
scores every distinct-value midpoint by partitioning the node's rows
afresh and recounting labels.  Only the criterion formulas are shared with
the fast grower.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .criteria import node_impurity, split_gains
from .dataset import Dataset
from .grower import BEST_FIRST, FIFO, GrowConfig, Tree, TreeBuilder, check_task

_CHUNK = 256


@dataclass
class NaiveNodeData:
    rows: list
    depth: int
    stats: np.ndarray
    node_id: int = -1
    best: tuple | None = None  # (gain, feature, threshold)


class NaiveGrower:
    def __init__(self, ds: Dataset, cfg: GrowConfig):
        self.criterion = check_task(ds, cfg)
        self.ds = ds
        self.cfg = cfg
        self.columns = ds.columns
        self.labels = ds.labels
        if self.criterion.is_classification:
            self.n_classes = ds.n_classes
            self.onehot = np.eye(ds.n_classes)[ds.labels]
        else:
            y = ds.labels.astype(np.float64)
            self.onehot = np.stack([np.ones_like(y), y, y * y], axis=1)

    def stats(self, rows) -> np.ndarray:
        return self.criterion.label_stats(self.labels[rows], self.ds.n_classes)

    def candidates(self, rows, f):
        """Distinct-value midpoints of feature ``f`` among ``rows``, ascending."""
        x = self.columns[f]
        ordered = sorted(rows, key=lambda r: (x[r], r))
        values = [float(x[r]) for r in ordered]
        mids = []
        for a, b in zip(values, values[1:]):
            if a < b:
                mids.append((a + b) / 2.0)
        return mids

    def score(self, rows, f, thresholds, parent):
        """Gains and left counts for every threshold, each from a direct scan."""
        x = self.columns[f][rows].astype(np.float64)
        onehot = self.onehot[rows]
        n = len(rows)
        parent_impurity = node_impurity(self.criterion.code, parent, n)
        gains, n_lefts = [], []
        for lo in range(0, len(thresholds), _CHUNK):
            t = np.asarray(thresholds[lo : lo + _CHUNK])
            goes_left = x[None, :] <= t[:, None]
            lefts = goes_left.astype(np.float64) @ onehot
            rights = (~goes_left).astype(np.float64) @ onehot
            nl = goes_left.sum(axis=1).astype(np.int64)
            nr = n - nl
            gains.append(split_gains(self.criterion.code, parent_impurity, n, lefts, nl, rights, nr))
            n_lefts.append(nl)
        if not gains:
            return np.empty(0), np.empty(0, dtype=np.int64)
        return np.concatenate(gains), np.concatenate(n_lefts)

    def best_split(self, node: NaiveNodeData):
        min_leaf = self.cfg.min_leaf_samples
        n = len(node.rows)
        best = None
        for f in range(self.ds.n_features):
            thresholds = self.candidates(node.rows, f)
            gains, n_lefts = self.score(node.rows, f, thresholds, node.stats)
            for t, g, nl in zip(thresholds, gains, n_lefts):
                if nl < min_leaf or n - nl < min_leaf:
                    continue
                if g > 0.0 and (best is None or g > best[0]):
                    best = (float(g), f, t)
        return best

    def leaf_value(self, stats) -> float:
        if self.criterion.is_classification:
            counts = list(stats)
            return float(counts.index(max(counts)))
        return float(stats[1] / stats[0])

    def grow(self, order: str = BEST_FIRST) -> Tree:
        cfg = self.cfg
        builder = TreeBuilder()
        frontier = []
        seq = 0

        def admit(node: NaiveNodeData):
            nonlocal seq
            node.node_id = builder.add(node.depth, len(node.rows))
            if node.depth < cfg.max_depth and len(node.rows) >= 2 * cfg.min_leaf_samples:
                node.best = self.best_split(node)
            if node.best is None:
                builder.set_leaf(node.node_id, self.leaf_value(node.stats))
                return
            key = (-node.best[0], seq) if order == BEST_FIRST else (seq,)
            heapq.heappush(frontier, (*key, node))
            seq += 1

        all_rows = list(range(self.ds.n_rows))
        admit(NaiveNodeData(all_rows, 0, self.stats(all_rows)))
        n_leaves = 1
        while frontier:
            node = heapq.heappop(frontier)[-1]
            if cfg.max_leaves is not None and n_leaves >= cfg.max_leaves:
                builder.set_leaf(node.node_id, self.leaf_value(node.stats))
                continue
            _, f, t = node.best
            x = self.columns[f]
            left_rows = [r for r in node.rows if x[r] <= t]
            right_rows = [r for r in node.rows if not x[r] <= t]
            left = NaiveNodeData(left_rows, node.depth + 1, self.stats(left_rows))
            right = NaiveNodeData(right_rows, node.depth + 1, self.stats(right_rows))
            n_leaves += 1
            admit(left)
            admit(right)
            builder.set_split(node.node_id, f, t, left.node_id, right.node_id)
        return builder.build(self.ds.task, self.ds.n_features, self.ds.n_classes, cfg)


def grow_naive(ds: Dataset, cfg: GrowConfig, order: str = BEST_FIRST) -> Tree:
    """Same contract as :func:`dequetree.grower.grow`, re-sorting at every node."""
    if order not in (BEST_FIRST, FIFO):
        raise ValueError(f"unknown frontier order {order!r}")
    return NaiveGrower(ds, cfg).grow(order)


@dataclass(frozen=True)
class TreeComparison:
    equal: bool
    path: str | None = None
    detail: str = ""

    def __bool__(self):
        return self.equal


def trees_equal(a: Tree, b: Tree, threshold_tol: float = 0.0) -> TreeComparison:
    """Structural comparison from the root; reports the first differing node.

    Paths read like ``root.L.R``.  ``threshold_tol`` also bounds the
    difference allowed between regression leaf values.
    """
    stack = [(0, 0, "root")]
    while stack:
        i, j, path = stack.pop()
        leaf_a, leaf_b = a.feature[i] < 0, b.feature[j] < 0
        if leaf_a != leaf_b:
            kind = lambda leaf: "leaf" if leaf else "internal"  # noqa: E731
            return TreeComparison(False, path, f"{kind(leaf_a)} vs {kind(leaf_b)}")
        if a.n_samples[i] != b.n_samples[j]:
            return TreeComparison(
                False, path, f"n_samples {a.n_samples[i]} vs {b.n_samples[j]}"
            )
        if leaf_a:
            va, vb = float(a.value[i]), float(b.value[j])
            if not abs(va - vb) <= threshold_tol:
                return TreeComparison(False, path, f"prediction {va!r} vs {vb!r}")
            continue
        if a.feature[i] != b.feature[j]:
            return TreeComparison(False, path, f"feature {a.feature[i]} vs {b.feature[j]}")
        ta, tb = float(a.threshold[i]), float(b.threshold[j])
        if not abs(ta - tb) <= threshold_tol:
            return TreeComparison(False, path, f"threshold {ta!r} vs {tb!r}")
        stack.append((int(a.right[i]), int(b.right[j]), path + ".R"))
        stack.append((int(a.left[i]), int(b.left[j]), path + ".L"))
    return TreeComparison(True)
