import numpy as np

from dequetree import Dataset, GrowConfig, grow, grow_naive, trees_equal
from dequetree.verify import duplicate_fraction, random_instance, run_trials

from conftest import xor_dataset


def test_trees_equal_reflexive_and_leaf_mismatch():
    ds = xor_dataset()
    tree, _ = grow(ds, GrowConfig())
    assert trees_equal(tree, tree, 0.0)
    a, _ = grow(Dataset.from_rows([[1.0], [2.0]], [0, 0]), GrowConfig())
    b, _ = grow(Dataset.from_rows([[1.0], [2.0]], [1, 1]), GrowConfig())
    cmp = trees_equal(a, b)
    assert not cmp and cmp.path == "root" and "prediction" in cmp.detail


def test_first_difference_path_names_the_node():
    ds = xor_dataset(extra_origin=True)
    a, _ = grow(ds, GrowConfig())
    b, _ = grow(ds, GrowConfig())
    right = int(b.right[0])
    b.threshold[right] = np.nextafter(b.threshold[right], 1.0)
    cmp = trees_equal(a, b)
    assert cmp.path == "root.R" and "threshold" in cmp.detail
    assert trees_equal(a, b, threshold_tol=1e-9)


def test_single_leaf_agrees():
    ds = Dataset.from_rows([[1.0], [1.0], [1.0]], [0, 1, 0])
    assert grow_naive(ds, GrowConfig()).n_leaves == 1
    assert trees_equal(grow(ds, GrowConfig())[0], grow_naive(ds, GrowConfig()))


def test_random_instances_have_duplicates_and_agree():
    rng = np.random.default_rng(1)
    for criterion in ("gini", "entropy", "variance"):
        ds = random_instance(rng, criterion, max_rows=200, max_features=5)
        assert all(duplicate_fraction(ds.columns[f]) >= 0.3 for f in range(ds.n_features))
        cfg = GrowConfig(max_depth=8, min_leaf_samples=2, criterion=criterion)
        assert trees_equal(grow(ds, cfg)[0], grow_naive(ds, cfg), 1e-9)


def test_injected_fault_is_caught():
    trial = next(run_trials(1, seed=0, inject_fault=True))
    assert not trial.comparison
    assert trial.comparison.path.startswith("root")
