"""Best-split search: one front-to-back pass over each feature's deque."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .criteria import Criterion, children_weighted_rest, node_impurity
from .deques import NodeFrame, push_stats


@dataclass(frozen=True)
class SplitCandidate:
    """Rows with ``value <= threshold`` on ``feature`` go left."""

    feature: int
    threshold: float
    gain: float
    left_count: int
    right_count: int


def _build_scanners(kind):
    # ``kind`` is frozen into each kernel so the criterion branches fold away
    # at compile time; a runtime criterion code costs several times more.

    @numba.njit(cache=True)
    def scan_feature(ids, start, n, x, total, min_leaf, y_class, y_real, left):
        # Returns (best_gain, boundary position, boundaries examined).  A
        # boundary at position i separates deque entries i and i + 1.
        for j in range(left.shape[0]):
            left[j] = 0.0
        parent_impurity = node_impurity(kind, total, n)
        best_gain = 0.0
        best_children = np.inf
        best_pos = -1
        evals = 0
        for i in range(n - 1):
            r = ids[start + i]
            push_stats(kind, left, r, y_class, y_real)
            evals += 1
            n_left = i + 1
            if n_left < min_leaf or n - n_left < min_leaf:
                continue
            if not x[r] < x[ids[start + i + 1]]:
                continue
            children = children_weighted_rest(kind, total, left, n, n_left)
            # gain falls as ``children`` rises, so no larger value can win
            if children >= best_children:
                continue
            g = parent_impurity - children / n
            if g > best_gain:
                best_gain = g
                best_children = children
                best_pos = i
        return best_gain, best_pos, evals

    @numba.njit(cache=True)
    def scan_node(ids2d, start, n, columns, total, min_leaf, y_class, y_real, left):
        best_gain = 0.0
        best_feature = -1
        best_pos = -1
        evals = 0
        for f in range(ids2d.shape[0]):
            g, pos, e = scan_feature(
                ids2d[f], start, n, columns[f], total, min_leaf, y_class, y_real, left
            )
            evals += e
            # strictly greater: earlier features win ties, and within a
            # feature the scan order already favours the lower threshold
            if pos >= 0 and g > best_gain:
                best_gain = g
                best_feature = f
                best_pos = pos
        return best_gain, best_feature, best_pos, evals

    return scan_feature, scan_node


_SCANNERS = {c.code: _build_scanners(c.code) for c in Criterion}


def _candidate(frame: NodeFrame, feature: int, pos: int, g: float) -> SplitCandidate:
    store = frame.store
    ids = store.slabs[frame.slab][feature]
    x = store.columns[feature]
    a = float(x[ids[frame.start + pos]])
    b = float(x[ids[frame.start + pos + 1]])
    # midpoint of two float32 values is exact in double precision
    return SplitCandidate(feature, (a + b) / 2.0, float(g), pos + 1, frame.n - pos - 1)


def best_split_for_feature(
    frame: NodeFrame, f: int, criterion: Criterion | str, min_leaf: int = 1, counters=None
) -> SplitCandidate | None:
    criterion = Criterion(criterion)
    if frame.n < 2:
        return None
    store = frame.store
    left = np.zeros(store.width)
    scan_feature = _SCANNERS[criterion.code][0]
    g, pos, evals = scan_feature(
        store.slabs[frame.slab][f], frame.start, frame.n, store.columns[f],
        frame.label_stats, min_leaf, store.y_class, store.y_real, left,
    )
    if counters is not None:
        counters.boundary_evals += evals
    return _candidate(frame, f, pos, g) if pos >= 0 else None


def best_split_for_node(
    frame: NodeFrame, criterion: Criterion | str, min_leaf: int = 1, counters=None
) -> SplitCandidate | None:
    """Maximum-gain split over all features, or None if no split has gain > 0.

    Ties go to the lower feature index, then the lower threshold.
    """
    criterion = Criterion(criterion)
    if frame.n < max(2, 2 * min_leaf):
        return None
    store = frame.store
    left = np.zeros(store.width)
    scan_node = _SCANNERS[criterion.code][1]
    g, feature, pos, evals = scan_node(
        store.slabs[frame.slab], frame.start, frame.n, store.columns,
        frame.label_stats, min_leaf, store.y_class, store.y_real, left,
    )
    if counters is not None:
        counters.boundary_evals += evals
    return _candidate(frame, feature, pos, g) if feature >= 0 else None


@numba.njit(cache=True)
def _prefix_trace(ids, start, n, kind, width, y_class, y_real):
    out = np.zeros((n, width))
    acc = np.zeros(width)
    for i in range(n):
        push_stats(kind, acc, ids[start + i], y_class, y_real)
        out[i] = acc
    return out


def prefix_stats(frame: NodeFrame, f: int) -> np.ndarray:
    """Left statistics after each incremental update along deque ``f``.

    Row ``i`` holds the statistics of the first ``i + 1`` deque entries as
    accumulated by the same update routine the scan uses.
    """
    store = frame.store
    return _prefix_trace(
        store.slabs[frame.slab][f], frame.start, frame.n, store.kind, store.width,
        store.y_class, store.y_real,
    )
