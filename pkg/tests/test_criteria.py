import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dequetree import Criterion, gain, impurity


@pytest.mark.parametrize(
    "counts, expected", [([2, 2], 0.5), ([3, 0], 0.0), ([2, 4], 4 / 9)]
)
def test_gini_examples(counts, expected):
    assert impurity("gini", counts) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize(
    "parent, left, right, expected",
    [
        ([2, 2], [2, 0], [0, 2], 0.5),
        ([2, 2], [1, 1], [1, 1], 0.0),
        ([2, 4], [2, 1], [0, 3], 2 / 9),
    ],
)
def test_gini_gain_examples(parent, left, right, expected):
    assert gain("gini", parent, left, right) == pytest.approx(expected, abs=1e-15)


def test_entropy_and_variance_textbook_values():
    assert impurity("entropy", [2, 2]) == pytest.approx(1.0)
    assert impurity("entropy", [4, 0]) == 0.0
    y = np.array([1.0, 2.0, 4.0])
    stats = Criterion.VARIANCE.label_stats(y)
    assert impurity("variance", stats) == pytest.approx(np.var(y))


counts_strategy = st.lists(st.integers(0, 40), min_size=2, max_size=5).filter(lambda c: sum(c) > 0)


@given(counts_strategy)
def test_classification_impurity_matches_definitions(counts):
    n = sum(counts)
    p = [c / n for c in counts]
    assert impurity("gini", counts) == pytest.approx(1 - sum(q * q for q in p), abs=1e-12)
    ent = -sum(q * math.log2(q) for q in p if q > 0)
    assert impurity("entropy", counts) == pytest.approx(ent, abs=1e-12)


@given(st.lists(st.integers(0, 30), min_size=2, max_size=4), st.data())
def test_gain_matches_weighted_definition(parent, data):
    if sum(parent) < 2:
        return
    left = [data.draw(st.integers(0, c)) for c in parent]
    right = [p - l for p, l in zip(parent, left)]
    if sum(left) == 0 or sum(right) == 0:
        return
    n, nl, nr = sum(parent), sum(left), sum(right)
    for c in ("gini", "entropy"):
        expected = impurity(c, parent) - nl / n * impurity(c, left) - nr / n * impurity(c, right)
        assert gain(c, parent, left, right) == pytest.approx(expected, abs=1e-12)
        assert gain(c, parent, left, right) >= -1e-12  # concavity


def test_gain_count_mismatch_rejected():
    with pytest.raises(ValueError, match="add up"):
        gain("gini", [2, 2], [1, 0], [0, 1])
    with pytest.raises(ValueError, match="non-empty"):
        gain("gini", [2, 2], [0, 0], [2, 2])
    with pytest.raises(ValueError):
        impurity("gini", [0, 0])
