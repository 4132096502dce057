"""Per-node sorted index deques and the order-preserving two-way partition.

Every frontier node owns ``k`` deques, one per feature, each listing the
node's rows in ascending order of that feature.  Storage is two
preallocated ``(k, N)`` slabs of row ids.  A node occupies the window
``[start, start + n)`` of one slab in every feature row; because live nodes
always cover disjoint windows, the same window of the *other* slab is free.
Splitting a node consumes its deques front to back and appends each row id
to the back of the left or right child, which live side by side in that
free window of the other slab.  No sort runs and nothing is allocated per
split: the parent's window is released as the children are filled, so the
total deque storage never exceeds ``2 * k * N`` ids.

The branch annotation lives in a :class:`BranchBuffer` of ``N`` marks that
is allocated once per training run and reused for every split.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .criteria import VARIANCE, Criterion
from .dataset import Dataset, SortedColumns

UNMARKED = 0
LEFT = 1
RIGHT = 2


class BranchBuffer:
    """One branch mark per training row, reused across splits."""

    def __init__(self, n_rows: int):
        self.marks = np.zeros(n_rows, dtype=np.uint8)

    def __len__(self):
        return self.marks.shape[0]


@numba.njit(cache=True, inline="always")
def push_stats(kind, stats, row, y_class, y_real):
    if kind == VARIANCE:
        v = y_real[row]
        stats[0] += 1.0
        stats[1] += v
        stats[2] += v * v
    else:
        stats[y_class[row]] += 1.0


class DequeStore:
    """The two id slabs plus the read-only training columns they index."""

    def __init__(self, ds: Dataset, sorted_cols: SortedColumns, criterion: Criterion):
        if sorted_cols.order.shape != (ds.n_features, ds.n_rows):
            raise ValueError("sorted columns do not match the dataset shape")
        self.ds = ds
        self.criterion = criterion
        self.kind = criterion.code
        self.columns = ds.columns
        if criterion.is_classification:
            # the scan reads one label per deque entry in random row order;
            # a narrow dtype keeps the label array cache resident
            dtype = np.uint8 if ds.n_classes <= 256 else np.int32
            self.y_class = ds.labels.astype(dtype)
            self.y_real = np.zeros(1)
        else:
            self.y_class = np.zeros(1, dtype=np.uint8)
            self.y_real = ds.labels
        self.width = criterion.stats_width(ds.n_classes)
        self.slabs = (np.array(sorted_cols.order, dtype=np.int32), np.empty_like(sorted_cols.order))

    @property
    def n_features(self) -> int:
        return self.columns.shape[0]

    def root_frame(self) -> "NodeFrame":
        n = self.columns.shape[1]
        stats = np.zeros(self.width)
        _accumulate(self.kind, stats, self.slabs[0][0], 0, n, self.y_class, self.y_real)
        return NodeFrame(self, slab=0, start=0, n=n, depth=0, label_stats=stats)


@numba.njit(cache=True)
def _accumulate(kind, stats, ids, start, n, y_class, y_real):
    for i in range(start, start + n):
        push_stats(kind, stats, ids[i], y_class, y_real)


@dataclass(eq=False)
class NodeFrame:
    """A frontier leaf: its window in the deque store and its label statistics."""

    store: DequeStore
    slab: int
    start: int
    n: int
    depth: int
    label_stats: np.ndarray
    node_id: int = -1
    best: object = field(default=None)

    @property
    def deques(self) -> np.ndarray:
        """``(k, n)`` view; row ``f`` is the deque for feature ``f``."""
        return self.store.slabs[self.slab][:, self.start : self.start + self.n]

    def deque(self, f: int) -> np.ndarray:
        return self.deques[f]

    def rows(self) -> np.ndarray:
        return np.array(self.deques[0]) if self.store.n_features else np.empty(0, np.int32)


@numba.njit(cache=True)
def _mark(ids, start, n, x, threshold, marks):
    n_left = 0
    for i in range(start, start + n):
        r = ids[i]
        if x[r] <= threshold:
            marks[r] = 1
            n_left += 1
        else:
            marks[r] = 2
    return n_left


def mark_branches(frame: NodeFrame, split, buf: BranchBuffer) -> tuple[int, int]:
    """Annotate every row of ``frame``: LEFT iff its split-feature value <= threshold."""
    store = frame.store
    ids = store.slabs[frame.slab][split.feature]
    n_left = _mark(ids, frame.start, frame.n, store.columns[split.feature], split.threshold, buf.marks)
    n_right = frame.n - n_left
    if (n_left, n_right) != (split.left_count, split.right_count):
        raise AssertionError(
            f"marked counts ({n_left}, {n_right}) disagree with split "
            f"({split.left_count}, {split.right_count})"
        )
    return n_left, n_right


@numba.njit(cache=True)
def _partition(src, dst, start, n, n_left, marks, kind, y_class, y_real, left_stats, right_stats):
    k = src.shape[0]
    moves = 0
    for f in range(k):
        back_left = start
        back_right = start + n_left
        for i in range(start, start + n):
            r = src[f, i]
            # branchless: marks are close to random, so a branch mispredicts
            to_left = np.intp(marks[r] == 1)
            dst[f, back_right + (back_left - back_right) * to_left] = r
            back_left += to_left
            back_right += 1 - to_left
            moves += 1
    for i in range(start, start + n_left):
        push_stats(kind, left_stats, dst[0, i], y_class, y_real)
    for i in range(start + n_left, start + n):
        push_stats(kind, right_stats, dst[0, i], y_class, y_real)
    return moves


def split_deques(frame: NodeFrame, buf: BranchBuffer, counters=None) -> tuple[NodeFrame, NodeFrame]:
    """Stable-partition every deque of ``frame`` into left and right children.

    ``mark_branches`` must have run for this frame.  The parent is consumed:
    its ``n`` drops to zero and its window is handed to the children.
    """
    if frame.n == 0:
        raise ValueError("frame has already been split")
    store = frame.store
    split = frame.best
    n_left = split.left_count if split is not None else int(
        np.count_nonzero(buf.marks[frame.deque(0)] == LEFT)
    )
    n_right = frame.n - n_left
    if n_left < 1 or n_right < 1:
        raise ValueError("both branches must receive at least one row")
    src = store.slabs[frame.slab]
    dst = store.slabs[1 - frame.slab]
    left_stats = np.zeros(store.width)
    right_stats = np.zeros(store.width)
    moves = _partition(
        src, dst, frame.start, frame.n, n_left, buf.marks,
        store.kind, store.y_class, store.y_real, left_stats, right_stats,
    )
    if counters is not None:
        counters.element_moves += moves
    depth = frame.depth + 1
    left = NodeFrame(store, 1 - frame.slab, frame.start, n_left, depth, left_stats)
    right = NodeFrame(store, 1 - frame.slab, frame.start + n_left, n_right, depth, right_stats)
    frame.n = 0
    return left, right
