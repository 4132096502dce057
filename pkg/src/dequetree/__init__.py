"""Leaf-wise decision-tree induction over pre-sorted index deques."""

from .criteria import Criterion, gain, impurity
from .dataset import (
    DataError,
    Dataset,
    SortedColumns,
    load_csv,
    load_libsvm,
    make_synthetic,
    presort,
    subsample,
)
from .grower import Counters, GrowConfig, Tree, grow, leaf_report, predict
from .model_io import load_model, save_model
from .oracle import grow_naive, trees_equal
from .split import SplitCandidate, best_split_for_feature, best_split_for_node

__version__ = "0.1.0"

__all__ = [
    "Counters", "Criterion", "DataError", "Dataset", "GrowConfig", "SortedColumns",
    "SplitCandidate", "Tree", "best_split_for_feature", "best_split_for_node", "gain",
    "grow", "grow_naive", "impurity", "leaf_report", "load_csv", "load_libsvm",
    "load_model", "make_synthetic", "predict", "presort", "save_model", "subsample",
    "trees_equal",
]
