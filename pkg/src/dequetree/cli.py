"""Command-line entry point: train, predict, verify, bench.

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import bench
from .dataset import (
    CLASSIFICATION,
    REGRESSION,
    DataError,
    Dataset,
    load_csv,
    load_libsvm,
    make_synthetic,
    presort,
    read_csv_table,
    split_label_column,
    subsample,
)
from .grower import GrowConfig, grow
from .model_io import load_model, save_model
from .verify import dump_failure, verify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFY = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_data_flags(p, required=True):
    p.add_argument("--data", required=required, help="input file")
    p.add_argument("--format", choices=("csv", "libsvm"), default="csv")
    p.add_argument("--label-col", default="-1",
                   help="label column: 0-based index, negative from the end, or header name")
    p.add_argument("--header", action="store_true", help="CSV has a single header line")
    p.add_argument("--task", choices=(CLASSIFICATION, REGRESSION), default=CLASSIFICATION)


def _add_grow_flags(p):
    p.add_argument("--criterion", choices=("gini", "entropy", "variance"),
                   help="default: gini for classification, variance for regression")
    p.add_argument("--max-depth", type=int, default=32)
    p.add_argument("--min-leaf-samples", type=int, default=1)
    p.add_argument("--max-leaves", type=int, default=None)
    p.add_argument("--subsample", type=int, default=None, help="train on this many rows")
    p.add_argument("--seed", type=int, default=0, help="subsampling seed")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dequetree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="grow a tree and write a model file")
    _add_data_flags(p)
    _add_grow_flags(p)
    p.add_argument("--out", required=True, help="model file to write")

    p = sub.add_parser("predict", help="predict rows with a saved model")
    p.add_argument("--model", required=True)
    _add_data_flags(p)

    p = sub.add_parser("verify", help="check the deque grower against the naive oracle")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-rows", type=int, default=200)
    p.add_argument("--max-features", type=int, default=5)
    p.add_argument("--dump-dir", default="verify_failures")
    p.add_argument("--inject-fault", action="store_true",
                   help="nudge one oracle threshold by an ulp and compare exactly (self-test)")

    p = sub.add_parser("bench", help="time tree construction over a parameter sweep")
    _add_data_flags(p, required=False)
    p.add_argument("--synthetic", help="n,k,seed: generate uniform data instead of --data")
    _add_grow_flags(p)
    p.add_argument("--sweep", choices=sorted(bench.SWEEPS), required=True)
    p.add_argument("--values", required=True, help="comma-separated sweep values")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--csv", help="also write the report as CSV to this path")
    return parser


def _load(args, n_features=None) -> Dataset:
    if args.format == "libsvm":
        return load_libsvm(args.data, task=args.task, n_features=n_features)
    return load_csv(args.data, label_column=args.label_col, has_header=args.header, task=args.task)


def _config(args) -> GrowConfig:
    criterion = args.criterion or ("variance" if args.task == REGRESSION else "gini")
    try:
        return GrowConfig(
            max_depth=args.max_depth,
            min_leaf_samples=args.min_leaf_samples,
            max_leaves=args.max_leaves,
            criterion=criterion,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _training_data(args) -> Dataset:
    if getattr(args, "synthetic", None):
        try:
            n, k, seed = bench.parse_synthetic(args.synthetic)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        ds = make_synthetic(n, k, seed)
    elif args.data:
        ds = _load(args)
    else:
        raise UsageError("one of --data or --synthetic is required")
    if args.subsample is not None:
        ds = subsample(ds, args.subsample, args.seed)
    return ds


def cmd_train(args) -> int:
    cfg = _config(args)
    ds = _training_data(args)
    if (ds.task == CLASSIFICATION) != (cfg.criterion != "variance"):
        raise UsageError(f"criterion {cfg.criterion} does not fit task {ds.task}")
    bench.warm_up()
    t0 = time.perf_counter()
    sorted_cols = presort(ds)
    presort_s = time.perf_counter() - t0
    t0 = time.perf_counter()
    tree, counters = grow(ds, cfg, sorted_cols)
    grow_s = time.perf_counter() - t0
    save_model(tree, args.out)
    print(f"rows {ds.n_rows}  features {ds.n_features}")
    print(f"n_leaves {tree.n_leaves}  depth {tree.depth}")
    print(f"presort_s {presort_s:.6f}  grow_s {grow_s:.6f}")
    print(
        f"sort_calls {counters.sort_calls}  boundary_evals {counters.boundary_evals}  "
        f"element_moves {counters.element_moves}  nodes_split {counters.nodes_split}"
    )
    print(f"model written to {args.out}")
    return EXIT_OK


def _prediction_rows(args, tree):
    """Return ``(X, y or None)`` for the predict command."""
    if args.format == "libsvm":
        ds = load_libsvm(args.data, task=tree.task, n_features=tree.n_features)
        return ds.rows(), ds.labels
    table = read_csv_table(args.data, args.header)
    n_rows, n_cols = table.values.shape
    if n_rows == 0:
        return np.empty((0, tree.n_features), dtype=np.float32), None
    if n_cols == tree.n_features:
        return table.values, None
    if n_cols == tree.n_features + 1:
        X, y = split_label_column(table, args.label_col, tree.task)
        return X, y
    raise DataError(
        f"model expects {tree.n_features} features; data has {n_cols} columns"
    )


def cmd_predict(args) -> int:
    tree = load_model(args.model)
    X, y = _prediction_rows(args, tree)
    if X.shape[0] == 0:
        return EXIT_OK
    pred = tree.predict(X)
    if tree.task == CLASSIFICATION:
        sys.stdout.write("".join(f"{int(p)}\n" for p in pred))
    else:
        sys.stdout.write("".join(f"{float(p)!r}\n" for p in pred))
    if y is not None:
        if tree.task == CLASSIFICATION:
            print(f"accuracy {np.mean(pred == y):.6f}", file=sys.stderr)
        else:
            print(f"mse {np.mean((pred - y) ** 2):.6g}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials < 0:
        raise UsageError("--trials must be >= 0")
    if args.max_rows < 2 or args.max_features < 1:
        raise UsageError("--max-rows must be >= 2 and --max-features >= 1")
    if args.trials == 0:
        print("warning: 0 trials requested; nothing was checked", file=sys.stderr)
        print("PASS (vacuous)")
        return EXIT_OK
    report = verify(args.trials, args.seed, args.max_rows, args.max_features, args.inject_fault)
    if report.passed:
        print(f"PASS {report.trials}/{report.trials} trials identical to the naive oracle")
        return EXIT_OK
    print(f"FAIL {len(report.failures)}/{report.trials} trials differ from the naive oracle")
    for trial in report.failures:
        path = dump_failure(trial, args.dump_dir)
        cmp = trial.comparison
        print(f"  trial {trial.index}: first difference at {cmp.path}: {cmp.detail} (dumped to {path})")
    return EXIT_VERIFY


def cmd_bench(args) -> int:
    try:
        values = bench.parse_values(args.values)
    except ValueError as exc:
        raise UsageError(f"--values: {exc}") from None
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    cfg = _config(args)
    ds = _training_data(args)
    rows = bench.run_sweep(ds, args.sweep, values, cfg, args.repeats)
    print(f"rows {ds.n_rows}  features {ds.n_features}  repeats {args.repeats}")
    print(bench.format_table(args.sweep, rows))
    text = bench.to_csv(rows)
    if args.csv:
        Path(args.csv).write_text(text)
    else:
        print()
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"train": cmd_train, "predict": cmd_predict, "verify": cmd_verify, "bench": cmd_bench}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dequetree {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"dequetree {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        # arity or value problems surfaced by the model (e.g. non-finite rows)
        print(f"dequetree {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
