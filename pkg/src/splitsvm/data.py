"""Datasets: synthetic two-square sampling, CSV files, standardization.

The synthetic benchmark draws the positive class uniformly from the square
[-3, 10]^2 and the negative class uniformly from [-10, 3]^2.  The squares
overlap on [-3, 3]^2, so the classes are not separable and accuracies there
are capped by the overlap mass.

CSV layout: one row per point, features first, label last.  Labels are
written "1" / "-1"; accepted spellings on input are "1", "+1", "-1".  An
optional header row is auto-detected (any non-numeric cell).
"""

import csv
from dataclasses import dataclass

import numpy as np

from ._io import write_text_atomic
from .errors import InputError, ParseError

_LABELS = {"1": 1.0, "+1": 1.0, "-1": -1.0}


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.X.ndim != 2 or self.X.shape[0] < 1:
            raise InputError("features must form a nonempty 2-D array")
        if self.y.shape != (self.X.shape[0],):
            raise InputError("labels must be a vector matching the number of rows")
        if not np.all(np.isfinite(self.X)):
            raise InputError("features must be finite")
        if not np.all(np.isin(self.y, (1.0, -1.0))):
            raise InputError("labels must be +1 or -1")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


def generate_synthetic(n_train: int, n_test: int, seed: int):
    """Balanced train/test draws from the two overlapping squares."""
    for name, count in (("n_train", n_train), ("n_test", n_test)):
        if count < 2 or count % 2 != 0:
            raise InputError(f"{name} must be an even count of at least 2, got {count}")
    rng = np.random.default_rng(seed)

    def draw(count):
        pos = rng.uniform(-3.0, 10.0, size=(count // 2, 2))
        neg = rng.uniform(-10.0, 3.0, size=(count // 2, 2))
        x = np.vstack([pos, neg])
        y = np.concatenate([np.ones(count // 2), -np.ones(count // 2)])
        return Dataset(x, y)

    return draw(n_train), draw(n_test)


def _read_rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return [(i + 1, row) for i, row in enumerate(csv.reader(fh))]


def _is_numeric_row(row):
    try:
        for cell in row:
            float(cell)
    except ValueError:
        return False
    return True


def _data_rows(path):
    rows = [(ln, row) for ln, row in _read_rows(path) if row]
    if not rows:
        raise ParseError(f"{path}: file contains no data")
    if not _is_numeric_row(rows[0][1]):
        rows = rows[1:]  # header
        if not rows:
            raise ParseError(f"{path}: file contains a header but no data")
    width = len(rows[0][1])
    for ln, row in rows:
        if len(row) != width:
            raise ParseError(
                f"{path}: line {ln} has {len(row)} fields, expected {width}"
            )
    return rows, width


def load_csv(path: str) -> Dataset:
    """Read a labeled dataset (features..., label)."""
    rows, width = _data_rows(path)
    if width < 2:
        raise ParseError(f"{path}: need at least one feature column and a label column")
    feats = np.empty((len(rows), width - 1))
    labels = np.empty(len(rows))
    for k, (ln, row) in enumerate(rows):
        raw_label = row[-1].strip()
        if raw_label not in _LABELS:
            raise ParseError(
                f"{path}: line {ln}: label must be '1', '+1' or '-1', got {raw_label!r}"
            )
        labels[k] = _LABELS[raw_label]
        for j, cell in enumerate(row[:-1]):
            try:
                feats[k, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: line {ln}: field {j + 1} is not a number: {cell!r}"
                ) from None
        if not np.all(np.isfinite(feats[k])):
            raise ParseError(f"{path}: line {ln}: features must be finite")
    return Dataset(feats, labels)


def load_features_csv(path: str) -> np.ndarray:
    """Read an unlabeled feature matrix (used by prediction)."""
    rows, width = _data_rows(path)
    feats = np.empty((len(rows), width))
    for k, (ln, row) in enumerate(rows):
        for j, cell in enumerate(row):
            try:
                feats[k, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: line {ln}: field {j + 1} is not a number: {cell!r}"
                ) from None
        if not np.all(np.isfinite(feats[k])):
            raise ParseError(f"{path}: line {ln}: features must be finite")
    return feats


def _format_row(values, label=None):
    cells = [f"{v:.17g}" for v in values]
    if label is not None:
        cells.append("1" if label > 0 else "-1")
    return ",".join(cells)


def save_csv(ds: Dataset, path: str) -> None:
    lines = [_format_row(ds.X[i], ds.y[i]) for i in range(ds.n)]
    write_text_atomic(path, "\n".join(lines) + "\n")


def save_labeled_features(features, labels, path: str) -> None:
    features = np.asarray(features, dtype=float)
    lines = [_format_row(features[i], labels[i]) for i in range(features.shape[0])]
    write_text_atomic(path, "\n".join(lines) + "\n")


#: Features with standard deviation below this are centered but not scaled.
SCALE_FLOOR = 1e-12


def standardize(train: Dataset, others=()):
    """Center/scale features by the training statistics only.

    Returns (train_scaled, [others_scaled...], means, scales).  The scales
    are the training standard deviations with 1.0 substituted where the
    deviation is below SCALE_FLOOR (such features are centered, not scaled).
    Test or prediction data must always be transformed with the training
    statistics, never its own.
    """
    means = train.X.mean(axis=0)
    stds = train.X.std(axis=0)
    scales = np.where(stds < SCALE_FLOOR, 1.0, stds)

    def apply(ds):
        return Dataset((ds.X - means) / scales, ds.y)

    return apply(train), [apply(ds) for ds in others], means, scales
