import re
from importlib import resources

import pytest

from dequetree import bench
from dequetree.cli import main

IRIS = str(resources.files("dequetree") / "data" / "iris.csv")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def field(out, name):
    return int(re.search(rf"{name} (\d+)", out).group(1))


def test_train_on_bundled_csv(tmp_path, capsys):
    model = tmp_path / "iris.model"
    code, out, _ = run(capsys, "train", "--data", IRIS, "--header", "--out", str(model))
    assert code == 0 and model.exists()
    assert field(out, "n_leaves") >= 1
    assert field(out, "sort_calls") == 4


def test_max_depth_echoed(tmp_path, capsys):
    code, out, _ = run(capsys, "train", "--data", IRIS, "--header", "--max-depth", "1",
                       "--out", str(tmp_path / "m"))
    assert code == 0 and field(out, "depth") <= 1


def test_predict_own_training_data(tmp_path, capsys):
    model = str(tmp_path / "m")
    run(capsys, "train", "--data", IRIS, "--header", "--out", model)
    code, out, err = run(capsys, "predict", "--model", model, "--data", IRIS, "--header")
    assert code == 0
    assert len(out.splitlines()) == 150
    # no two iris rows share features but differ in species, so the tree fits exactly
    assert err == "accuracy 1.000000\n"


def test_libsvm_train_predict(tmp_path, capsys, write_text):
    data = str(write_text("a.svm", "1 1:0.5 2:1\n0 1:2 2:0.1\n1 1:0.4\n"))
    model = str(tmp_path / "m")
    assert run(capsys, "train", "--data", data, "--format", "libsvm", "--out", model)[0] == 0
    code, out, _ = run(capsys, "predict", "--model", model, "--data", data, "--format", "libsvm")
    assert (code, out) == (0, "1\n0\n1\n")


def test_predict_feature_only_and_empty(tmp_path, capsys, write_text):
    model = str(tmp_path / "m")
    run(capsys, "train", "--data", IRIS, "--header", "--max-depth", "1", "--out", model)
    code, out, err = run(capsys, "predict", "--model", model,
                         "--data", str(write_text("x.csv", "5.0,3.4,1.5,0.2\n")))
    assert (code, out, err) == (0, "0\n", "")
    code, out, _ = run(capsys, "predict", "--model", model, "--data", str(write_text("e.csv", "")))
    assert (code, out) == (0, "")


def test_single_leaf_model_gives_constant_column(tmp_path, capsys, write_text):
    data = str(write_text("c.csv", "1,2,1\n3,4,1\n5,6,1\n"))
    model = str(tmp_path / "m")
    run(capsys, "train", "--data", data, "--out", model)
    _, out, _ = run(capsys, "predict", "--model", model, "--data", data)
    assert out == "1\n1\n1\n"


def test_subsample_is_reproducible(tmp_path, capsys):
    paths = [tmp_path / "a", tmp_path / "b"]
    for p in paths:
        run(capsys, "train", "--data", IRIS, "--header", "--subsample", "100", "--seed", "3",
            "--out", str(p))
    assert paths[0].read_bytes() == paths[1].read_bytes()


@pytest.mark.parametrize(
    "argv, code",
    [
        (["train", "--data", IRIS], 1),  # --out missing
        (["train", "--data", IRIS, "--header", "--max-depth", "0", "--out", "m"], 1),
        (["train", "--data", "/no/such/file.csv", "--out", "m"], 2),
        (["bench", "--sweep", "max-depth", "--values", ""], 1),
        (["verify", "--trials", "-1"], 1),
        (["nonsense"], 1),
    ],
)
def test_exit_codes(argv, code, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == code


def test_parse_error_is_data_error(tmp_path, capsys, write_text):
    code, _, err = run(capsys, "train", "--data", str(write_text("b.csv", "1,x,0\n")),
                       "--out", str(tmp_path / "m"))
    assert code == 2 and "row 1, column 1" in err


def test_predict_arity_mismatch(tmp_path, capsys, write_text):
    model = str(tmp_path / "m")
    run(capsys, "train", "--data", IRIS, "--header", "--out", model)
    code, _, err = run(capsys, "predict", "--model", model, "--data", str(write_text("w.csv", "1,2\n")))
    assert code == 2 and "expects 4 features" in err


def test_verify_passes_and_vacuous(capsys):
    code, out, _ = run(capsys, "verify", "--trials", "36", "--seed", "42")
    assert code == 0 and out.startswith("PASS 36/36")
    code, out, err = run(capsys, "verify", "--trials", "0")
    assert code == 0 and "vacuous" in out and "warning" in err


def test_verify_injected_fault_fails_with_path(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--trials", "2", "--inject-fault",
                       "--dump-dir", str(tmp_path / "dump"))
    assert code == 3
    assert "first difference at root" in out
    assert len(list((tmp_path / "dump").glob("*.json"))) == 2


def test_bench_sweep_csv(tmp_path, capsys):
    csv_path = tmp_path / "b.csv"
    code, out, _ = run(capsys, "bench", "--synthetic", "20000,4,1", "--sweep", "max-depth",
                       "--values", "2,4,8", "--repeats", "3", "--csv", str(csv_path))
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == ",".join(bench.CSV_HEADER)
    rows = [dict(zip(bench.CSV_HEADER, line.split(","))) for line in lines[1:]]
    assert [r["param"] for r in rows] == ["2", "4", "8"]
    assert all(float(r["grow_mean_s"]) > 0 and float(r["grow_std_s"]) > 0 for r in rows)
    assert all(r["sort_calls"] == "4" for r in rows)


def test_bench_leaf_counts_fall_with_min_leaf(capsys):
    from dequetree import GrowConfig
    from dequetree.dataset import make_synthetic

    rows = bench.run_sweep(make_synthetic(20000, 4, 2), "min-leaf-samples",
                           [1, 5, 10, 50, 100], GrowConfig())
    leaves = [r.n_leaves for r in rows]
    assert leaves == sorted(leaves, reverse=True)
    assert rows[0].grow_std_s == 0.0  # single repeat
