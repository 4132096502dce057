"""Versioned plain-text model files.

Layout: ``key value`` header lines, then one line per node in pre-order::

    I <feature> <threshold hex-float> <threshold decimal> <n_samples>
    L <value hex-float> <n_samples> <value decimal>

Hex-floats make thresholds and leaf values round-trip bit for bit; the
decimal column is for humans and ignored on load.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .dataset import TASKS, DataError
from .grower import GrowConfig, Tree, TreeBuilder

MAGIC = "dequetree-model"
FORMAT_VERSION = 1


def dumps(tree: Tree) -> str:
    cfg = tree.config
    lines = [
        f"{MAGIC} {FORMAT_VERSION}",
        f"task {tree.task}",
        f"n_features {tree.n_features}",
        f"n_classes {tree.n_classes}",
        f"criterion {cfg.criterion}",
        f"max_depth {cfg.max_depth}",
        f"min_leaf_samples {cfg.min_leaf_samples}",
        f"max_leaves {cfg.max_leaves if cfg.max_leaves is not None else 'none'}",
        f"n_nodes {tree.n_nodes}",
    ]
    stack = [0]
    while stack:
        i = stack.pop()
        if tree.feature[i] < 0:
            v = float(tree.value[i])
            lines.append(f"L {v.hex()} {int(tree.n_samples[i])} {v!r}")
        else:
            t = float(tree.threshold[i])
            lines.append(f"I {int(tree.feature[i])} {t.hex()} {t!r} {int(tree.n_samples[i])}")
            stack.append(int(tree.right[i]))
            stack.append(int(tree.left[i]))
    return "\n".join(lines) + "\n"


def save_model(tree: Tree, path) -> None:
    Path(path).write_text(dumps(tree))


def loads(text: str) -> Tree:
    lines = text.splitlines()
    if not lines or lines[0].split() != [MAGIC, str(FORMAT_VERSION)]:
        raise DataError("not a dequetree model file (bad magic or version)")
    header = {}
    pos = 1
    while pos < len(lines) and lines[pos].split()[0] not in ("I", "L"):
        key, _, value = lines[pos].partition(" ")
        header[key] = value.strip()
        pos += 1
    try:
        task = header["task"]
        n_features = int(header["n_features"])
        n_classes = int(header["n_classes"])
        max_leaves = None if header["max_leaves"] == "none" else int(header["max_leaves"])
        cfg = GrowConfig(
            max_depth=int(header["max_depth"]),
            min_leaf_samples=int(header["min_leaf_samples"]),
            max_leaves=max_leaves,
            criterion=header["criterion"],
        )
        n_nodes = int(header["n_nodes"])
    except (KeyError, ValueError) as exc:
        raise DataError(f"bad model header: {exc}") from None
    if task not in TASKS:
        raise DataError(f"bad model task {task!r}")
    body = lines[pos:]
    if len(body) != n_nodes:
        raise DataError(f"model declares {n_nodes} nodes but lists {len(body)}")

    builder = TreeBuilder()
    # pre-order: each internal node is followed by its left then right subtree
    pending = []  # (parent id, is_left)
    try:
        for line_no, line in enumerate(body, start=pos + 1):
            parts = line.split()
            depth = 0
            parent = None
            if pending:
                parent, is_left = pending.pop()
                depth = builder.depths[parent] + 1
            elif builder.feature:
                raise DataError(f"line {line_no}: node outside the tree")
            if parts[0] == "I":
                node = builder.add(depth, int(parts[4]))
                builder.set_split(node, int(parts[1]), float.fromhex(parts[2]), -1, -1)
                pending.append((node, False))
                pending.append((node, True))
            elif parts[0] == "L":
                node = builder.add(depth, int(parts[2]))
                builder.set_leaf(node, float.fromhex(parts[1]))
            else:
                raise DataError(f"line {line_no}: unknown node kind {parts[0]!r}")
            if parent is not None:
                if is_left:
                    builder.left[parent] = node
                else:
                    builder.right[parent] = node
    except (IndexError, ValueError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"malformed node line: {exc}") from None
    if pending:
        raise DataError("model node list ends before the tree is complete")
    tree = builder.build(task, n_features, n_classes, cfg)
    tree.searched = None
    if (tree.feature >= n_features).any():
        raise DataError("model references a feature beyond n_features")
    if not np.isfinite(tree.threshold[tree.feature >= 0]).all():
        raise DataError("model has a non-finite threshold")
    return tree


def load_model(path) -> Tree:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such model file: {path}")
    return loads(path.read_text())
