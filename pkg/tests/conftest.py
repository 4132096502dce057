import numpy as np
import pytest

from dequetree import Dataset


@pytest.fixture
def write_text(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write


def xor_dataset(extra_origin=False):
    """Four XOR corners; ``extra_origin`` repeats (0, 0) so the root split gains."""
    X = [[0, 0], [0, 1], [1, 0], [1, 1]] + ([[0, 0]] if extra_origin else [])
    y = [0, 1, 1, 0] + ([0] if extra_origin else [])
    return Dataset.from_rows(np.array(X, dtype=np.float32), np.array(y))


def line_dataset(labels=(0, 0, 1, 1)):
    X = np.array([[1.0], [2.0], [3.0], [4.0]], dtype=np.float32)
    return Dataset.from_rows(X, np.array(labels))


def random_dataset(rng, n=200, k=5, n_classes=3, dup_pool=None):
    """Classification data; ``dup_pool`` limits each column to that many distinct values."""
    if dup_pool is None:
        X = rng.normal(size=(n, k)).astype(np.float32)
    else:
        X = rng.integers(0, dup_pool, size=(n, k)).astype(np.float32)
    y = rng.integers(0, n_classes, n)
    return Dataset.from_rows(X, y)


_ACCEPTANCE = []


@pytest.fixture
def acceptance(capsys):
    """``acceptance(name, ok, detail)`` prints one PASS/FAIL line, then asserts ``ok``."""

    def _report(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        _ACCEPTANCE.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
