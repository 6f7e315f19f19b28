"""Dataset loading, L2 row normalization and k-fold splitting."""

from __future__ import annotations

import csv
import gzip
import io
import os
from dataclasses import dataclass

import numpy as np

DEFAULT_TARGET = "target"


class DataError(ValueError):
    """Raised for unreadable or malformed dataset files."""


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: tuple
    name: str = ""

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1:
            raise DataError("X must be a 2-D array with at least one row")
        if y.shape != (X.shape[0],):
            raise DataError(f"y has shape {y.shape}, expected ({X.shape[0]},)")
        if len(self.feature_names) != X.shape[1]:
            raise DataError("feature_names does not match the number of columns")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def normalized(self) -> "Dataset":
        """Copy with every row of X scaled to unit L2 norm; y is shared unchanged."""
        return Dataset(l2_normalize_rows(self.X), self.y, self.feature_names, self.name)


def _open_text(path):
    path = os.fspath(path)
    if path.endswith(".gz"):
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8", newline="")
    return open(path, encoding="utf-8", newline="")


def read_table(path):
    """Read a delimited numeric table with a header row.

    Tab or comma delimiters are detected from the header line; ``.gz`` files
    are decompressed. Leading ``#`` lines are skipped.

    :return: ``(column_names, matrix)``.
    :raises DataError: for a missing/empty file or a non-numeric cell.
    """
    try:
        fh = _open_text(path)
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror or exc}") from None
    with fh:
        lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise DataError(f"{path}: file is empty")
    delimiter = "\t" if "\t" in lines[0] else ","
    rows = list(csv.reader(lines, delimiter=delimiter))
    header = [h.strip() for h in rows[0]]
    values = np.empty((len(rows) - 1, len(header)), dtype=np.float64)
    for r, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise DataError(
                f"{path}: row {r + 1} has {len(row)} field(s), header has {len(header)}")
        for c, cell in enumerate(row):
            try:
                values[r, c] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric value {cell!r} at row {r + 1}, column {header[c]!r}"
                ) from None
    return header, values


def load_dataset(path, target_column: str = DEFAULT_TARGET) -> Dataset:
    """Load a raw (un-normalized) dataset; features are all non-target columns."""
    header, values = read_table(path)
    if target_column not in header:
        raise DataError(f"{path}: no target column {target_column!r}")
    t = header.index(target_column)
    features = [h for i, h in enumerate(header) if i != t]
    if not features:
        raise DataError(f"{path}: no feature columns besides {target_column!r}")
    if values.shape[0] == 0:
        raise DataError(f"{path}: no data rows")
    X = np.delete(values, t, axis=1)
    name = os.path.basename(os.fspath(path))
    for suffix in (".gz", ".tsv", ".csv", ".txt"):
        name = name.removesuffix(suffix)
    return Dataset(X, values[:, t].copy(), tuple(features), name)


def l2_normalize_rows(X) -> np.ndarray:
    """Divide each row by its Euclidean norm. All-zero rows are left as they are."""
    X = np.asarray(X, dtype=np.float64)
    # pre-scale by the largest magnitude so squaring cannot under/overflow
    scale = np.max(np.abs(X), axis=-1, keepdims=True, initial=0.0)
    Xs = np.divide(X, scale, out=X.copy(), where=scale > 0)
    norms = np.linalg.norm(Xs, axis=-1, keepdims=True)
    return np.divide(Xs, norms, out=Xs, where=norms > 0)


@dataclass(frozen=True)
class FoldSplit:
    train_indices: np.ndarray
    test_indices: np.ndarray


def kfold(n_rows: int, k: int, rng) -> list:
    """Shuffle ``range(n_rows)`` once and cut it into ``k`` near-equal test blocks.

    :param rng: ``numpy.random.Generator`` or an integer seed.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if n_rows < k:
        raise ValueError(f"cannot make {k} folds from {n_rows} row(s)")
    rng = np.random.default_rng(rng)
    blocks = np.array_split(rng.permutation(n_rows), k)
    return [
        FoldSplit(np.concatenate(blocks[:i] + blocks[i + 1:]), blocks[i])
        for i in range(k)
    ]
