"""Parameter sweeps timing tree construction, pre-sort timed separately."""

from __future__ import annotations

import csv
import dataclasses
import io
import statistics
import time
from dataclasses import dataclass

from .dataset import Dataset, make_synthetic, presort
from .grower import GrowConfig, grow

SWEEPS = {"max-depth": "max_depth", "min-leaf-samples": "min_leaf_samples"}
CSV_HEADER = [
    "param", "n_leaves", "depth", "grow_mean_s", "grow_std_s", "presort_s",
    "boundary_evals", "element_moves", "sort_calls",
]


@dataclass(frozen=True)
class BenchRow:
    param: int
    n_leaves: int
    depth: int
    grow_mean_s: float
    grow_std_s: float
    presort_s: float
    boundary_evals: int
    element_moves: int
    sort_calls: int
    repeats: int


def warm_up() -> None:
    """Trigger JIT compilation so the first timed grow does not pay for it."""
    grow(make_synthetic(64, 2, 0), GrowConfig(max_depth=3))


def time_grow(ds: Dataset, cfg: GrowConfig, repeats: int = 1):
    """Return ``(tree, counters, grow_times, presort_time)``.

    The pre-sort runs once and is excluded from every grow timing.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    t0 = time.perf_counter()
    sorted_cols = presort(ds)
    presort_s = time.perf_counter() - t0
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        tree, counters = grow(ds, cfg, sorted_cols)
        times.append(time.perf_counter() - t0)
    return tree, counters, times, presort_s


def run_sweep(ds: Dataset, sweep: str, values, base: GrowConfig, repeats: int = 1) -> list[BenchRow]:
    if sweep not in SWEEPS:
        raise ValueError(f"unknown sweep {sweep!r}; choose from {sorted(SWEEPS)}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    warm_up()
    rows = []
    for value in values:
        cfg = dataclasses.replace(base, **{SWEEPS[sweep]: int(value)})
        tree, counters, times, presort_s = time_grow(ds, cfg, repeats)
        rows.append(
            BenchRow(
                param=int(value),
                n_leaves=tree.n_leaves,
                depth=tree.depth,
                grow_mean_s=statistics.fmean(times),
                grow_std_s=statistics.stdev(times) if len(times) > 1 else 0.0,
                presort_s=presort_s,
                boundary_evals=counters.boundary_evals,
                element_moves=counters.element_moves,
                sort_calls=counters.sort_calls,
                repeats=repeats,
            )
        )
    return rows


def format_table(sweep: str, rows: list[BenchRow]) -> str:
    """Transposed layout: one line per quantity, one column per sweep value."""
    lines = [
        (SWEEPS[sweep], [str(r.param) for r in rows]),
        ("# leaf", [f"{r.n_leaves:,}" for r in rows]),
        ("depth", [str(r.depth) for r in rows]),
        ("seconds", [f"{r.grow_mean_s:.3f}" for r in rows]),
        ("std", [f"{r.grow_std_s:.3f}" for r in rows]),
        ("presort s", [f"{r.presort_s:.3f}" for r in rows]),
    ]
    label_w = max(len(name) for name, _ in lines)
    col_w = max(len(c) for _, cells in lines for c in cells)
    out = []
    for i, (name, cells) in enumerate(lines):
        out.append(name.rjust(label_w) + " | " + "  ".join(c.rjust(col_w) for c in cells))
        if i == 0:
            out.append("-" * len(out[0]))
    return "\n".join(out)


def to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([
            r.param, r.n_leaves, r.depth, f"{r.grow_mean_s:.6f}", f"{r.grow_std_s:.6f}",
            f"{r.presort_s:.6f}", r.boundary_evals, r.element_moves, r.sort_calls,
        ])
    return buf.getvalue()


def parse_values(text: str) -> list[int]:
    values = [int(v) for v in text.replace(" ", "").split(",") if v]
    if not values:
        raise ValueError("empty sweep list")
    return values


def parse_synthetic(text: str) -> tuple[int, int, int]:
    parts = [int(float(p)) for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError("--synthetic expects n,k,seed")
    return parts[0], parts[1], parts[2]

