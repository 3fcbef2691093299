"""Labeled datasets and train/test partitioning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument, ShapeError


@dataclass
class LabeledDataset:
    """Samples in rows of ``X``; labels are integers 1..n_classes.

    When ``n_classes`` is omitted it is taken as max(y) and every class in
    1..C must occur.  Subsets keep the parent's class count, so a class
    may be absent from them.
    """

    X: np.ndarray
    y: np.ndarray
    n_classes: int | None = None

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=np.float64))
        y = np.asarray(self.y)
        if y.size and not np.all(np.equal(np.mod(y, 1), 0)):
            raise InvalidArgument("labels must be integers")
        self.y = y.astype(np.int64).ravel()
        if self.X.shape[0] != self.y.shape[0]:
            raise ShapeError(f"{self.X.shape[0]} rows but {self.y.shape[0]} labels")
        if self.y.size == 0:
            raise InvalidArgument("dataset is empty")
        if self.y.min() < 1:
            raise InvalidArgument("labels must be >= 1")
        if self.n_classes is None:
            self.n_classes = int(self.y.max())
            missing = sorted(set(range(1, self.n_classes + 1)) - set(self.y.tolist()))
            if missing:
                raise InvalidArgument(f"classes {missing} have no samples")
        elif self.y.max() > self.n_classes:
            raise InvalidArgument(f"label {self.y.max()} exceeds n_classes={self.n_classes}")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.intp)
        return LabeledDataset(self.X[idx], self.y[idx], self.n_classes)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y - 1, minlength=self.n_classes)


@dataclass(frozen=True)
class Partition:
    train: np.ndarray
    test: np.ndarray


def _n(ds_or_n) -> int:
    return ds_or_n.n_samples if isinstance(ds_or_n, LabeledDataset) else int(ds_or_n)


def holdout_split(ds, test_fraction=0.3, seed=0) -> Partition:
    """Shuffled holdout; the test side gets round(n * test_fraction) rows."""
    n = _n(ds)
    if not 0 < test_fraction < 1:
        raise InvalidArgument("test_fraction must be in (0, 1)")
    n_test = int(np.floor(n * test_fraction + 0.5))
    if n_test < 1 or n_test > n - 1:
        raise InvalidArgument(f"holdout of {test_fraction} on {n} rows leaves a side empty")
    perm = np.random.default_rng(seed).permutation(n)
    return Partition(np.sort(perm[n_test:]), np.sort(perm[:n_test]))


def kfold_split(ds, k=5, seed=0) -> list[np.ndarray]:
    """Shuffled rows dealt round-robin into k folds."""
    n = _n(ds)
    if not 2 <= k <= n:
        raise InvalidArgument(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(perm[i::k]) for i in range(k)]


def make_blobs(n_samples=200, n_features=20, n_classes=4, separation=3.0, seed=0) -> LabeledDataset:
    """Balanced Gaussian blobs with unit within-class std.

    Feature j is the signature feature of class (j mod C) + 1: that class's
    mean sits ``separation`` standard deviations above the others on it.
    """
    if n_features < n_classes:
        raise InvalidArgument("need at least one signature feature per class")
    rng = np.random.default_rng(seed)
    means = np.zeros((n_classes, n_features))
    means[np.arange(n_features) % n_classes, np.arange(n_features)] = separation
    y = np.arange(n_samples) % n_classes + 1
    X = means[y - 1] + rng.standard_normal((n_samples, n_features))
    return LabeledDataset(X, y, n_classes)
