"""Impurity criteria and the weighted impurity decrease used as split gain.

Label statistics are float64 vectors.  For classification they hold one
count per class; for regression they hold ``[count, sum, sum_of_squares]``.
The jitted scalar kernels here are the single definition of the formulas;
both the incremental scan and the naive oracle call them, so the two agree
bit for bit whenever they see the same statistics.
"""

from __future__ import annotations

import enum
import math

import numba
import numpy as np

GINI = 0
ENTROPY = 1
VARIANCE = 2


class Criterion(enum.Enum):
    GINI = "gini"
    ENTROPY = "entropy"
    VARIANCE = "variance"

    @property
    def code(self) -> int:
        return _CODES[self]

    @property
    def is_classification(self) -> bool:
        return self is not Criterion.VARIANCE

    def stats_width(self, n_classes: int) -> int:
        return n_classes if self.is_classification else 3

    def label_stats(self, labels, n_classes: int = 0) -> np.ndarray:
        """Statistics of ``labels`` computed by a direct pass."""
        labels = np.asarray(labels)
        if self.is_classification:
            return np.bincount(labels.astype(np.int64), minlength=n_classes).astype(
                np.float64
            )
        y = labels.astype(np.float64)
        return np.array([float(y.size), float(y.sum()), float((y * y).sum())])

    def count(self, stats) -> int:
        stats = np.asarray(stats, dtype=np.float64)
        return int(stats[0]) if self is Criterion.VARIANCE else int(stats.sum())

    def impurity(self, stats) -> float:
        stats = np.asarray(stats, dtype=np.float64)
        n = self.count(stats)
        if n < 1:
            raise ValueError("impurity of empty statistics is undefined")
        return float(node_impurity(self.code, stats, n))

    def gain(self, parent, left, right) -> float:
        parent, left, right = (np.asarray(s, dtype=np.float64) for s in (parent, left, right))
        n, nl, nr = self.count(parent), self.count(left), self.count(right)
        if nl + nr != n:
            raise ValueError(f"child counts {nl} + {nr} do not add up to parent count {n}")
        if nl < 1 or nr < 1:
            raise ValueError("both children must be non-empty")
        parent_impurity = node_impurity(self.code, parent, n)
        return float(split_gain(self.code, parent_impurity, n, left, nl, right, nr))


_CODES = {Criterion.GINI: GINI, Criterion.ENTROPY: ENTROPY, Criterion.VARIANCE: VARIANCE}


def impurity(c: Criterion | str, stats) -> float:
    return Criterion(c).impurity(stats)


def gain(c: Criterion | str, parent, left, right) -> float:
    return Criterion(c).gain(parent, left, right)


# Entropy goes through non-inlined helpers: inlined, LLVM may hoist the
# speculatable log2 out of its branch and pay for it under every criterion.


@numba.njit(cache=True, inline="never")
def _entropy_weighted(stats, n):
    acc = 0.0
    for j in range(stats.shape[0]):
        c = stats[j]
        if c > 0.0:
            acc += c * math.log2(c)
    return n * math.log2(n) - acc


@numba.njit(cache=True, inline="never")
def _entropy_weighted_rest(total, left, n):
    acc = 0.0
    for j in range(total.shape[0]):
        c = total[j] - left[j]
        if c > 0.0:
            acc += c * math.log2(c)
    return n * math.log2(n) - acc


@numba.njit(cache=True, inline="always")
def weighted_impurity(kind, stats, n):
    """``n * impurity(stats)``, arranged to need a single division."""
    if kind == VARIANCE:
        v = stats[2] - stats[1] * stats[1] / n
        return v if v > 0.0 else 0.0
    if kind == GINI:
        acc = 0.0
        for j in range(stats.shape[0]):
            acc += stats[j] * stats[j]
        return n - acc / n
    return _entropy_weighted(stats, n)


@numba.njit(cache=True, inline="always")
def weighted_impurity_rest(kind, total, left, n):
    """``weighted_impurity`` of ``total - left`` without materialising it.

    Performs the same operations in the same order, so the result is
    bit-identical whenever the subtraction is exact.
    """
    if kind == VARIANCE:
        s1 = total[1] - left[1]
        s2 = total[2] - left[2]
        v = s2 - s1 * s1 / n
        return v if v > 0.0 else 0.0
    if kind == GINI:
        acc = 0.0
        for j in range(total.shape[0]):
            c = total[j] - left[j]
            acc += c * c
        return n - acc / n
    return _entropy_weighted_rest(total, left, n)


@numba.njit(cache=True, inline="always")
def node_impurity(kind, stats, n):
    return weighted_impurity(kind, stats, n) / n


@numba.njit(cache=True, inline="always")
def split_gain(kind, parent_impurity, n, left, nl, right, nr):
    """Parent impurity minus the size-weighted child impurities."""
    return parent_impurity - (
        weighted_impurity(kind, left, nl) + weighted_impurity(kind, right, nr)
    ) / n


@numba.njit(cache=True, inline="always")
def children_weighted_rest(kind, total, left, n, nl):
    """Summed weighted impurity of ``left`` and ``total - left``.

    ``split_gain`` is ``parent_impurity - this / n`` and is monotone in it,
    which lets a scan skip the division for boundaries that cannot win.
    """
    return weighted_impurity(kind, left, nl) + weighted_impurity_rest(kind, total, left, n - nl)


@numba.njit(cache=True)
def split_gains(kind, parent_impurity, n, lefts, nls, rights, nrs):
    """Gain for each row of ``lefts``/``rights``; same arithmetic as ``split_gain``."""
    out = np.empty(lefts.shape[0])
    for i in range(lefts.shape[0]):
        out[i] = split_gain(kind, parent_impurity, n, lefts[i], nls[i], rights[i], nrs[i])
    return out
