import numpy as np
import pytest

from dequetree import DataError, Dataset, GrowConfig, grow, load_model, save_model
from dequetree.dataset import make_synthetic
from dequetree.model_io import dumps, loads


def test_round_trip_classification(tmp_path):
    ds = make_synthetic(3000, 5, seed=3)
    tree, _ = grow(ds, GrowConfig(max_depth=9, min_leaf_samples=4))
    save_model(tree, tmp_path / "m.txt")
    back = load_model(tmp_path / "m.txt")
    X = np.random.default_rng(0).random((1000, 5)).astype(np.float32)
    np.testing.assert_array_equal(back.predict(X), tree.predict(X))
    assert back.config == tree.config
    assert dumps(back) == dumps(tree)


def test_round_trip_regression_values_bit_exact():
    rng = np.random.default_rng(1)
    X = rng.random((500, 3))
    ds = Dataset.from_rows(X, np.sin(7 * X[:, 0]) + rng.normal(0, 0.1, 500), "regression")
    tree, _ = grow(ds, GrowConfig(max_depth=6, criterion="variance"))
    back = loads(dumps(tree))
    np.testing.assert_array_equal(back.predict(X), tree.predict(X))


@pytest.mark.parametrize(
    "text",
    ["", "other-format 1\n", "dequetree-model 99\n",
     "dequetree-model 1\ntask classification\n"],
)
def test_malformed_files_rejected(text):
    with pytest.raises(DataError):
        loads(text)


def test_truncated_node_list_rejected():
    tree, _ = grow(make_synthetic(200, 2, seed=0), GrowConfig(max_depth=3))
    lines = dumps(tree).splitlines()
    with pytest.raises(DataError):
        loads("\n".join(lines[:-1]) + "\n")
