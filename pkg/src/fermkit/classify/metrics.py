"""Confusion matrices, accuracy, ROC curves and 0-1 loss."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument, ShapeError


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # rows = true class, cols = predicted

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.total) if self.total else 0.0

    def precision(self) -> np.ndarray:
        col = self.counts.sum(axis=0)
        return np.divide(np.diag(self.counts), col, out=np.zeros(self.n_classes), where=col > 0)

    def recall(self) -> np.ndarray:
        row = self.counts.sum(axis=1)
        return np.divide(np.diag(self.counts), row, out=np.zeros(self.n_classes), where=row > 0)

    def to_csv(self) -> str:
        c = self.n_classes
        lines = ["true\\pred," + ",".join(str(j) for j in range(1, c + 1))]
        for i in range(c):
            lines.append(f"{i + 1}," + ",".join(str(int(v)) for v in self.counts[i]))
        return "\n".join(lines) + "\n"


def confusion(y_true, y_pred, n_classes) -> ConfusionMatrix:
    t = np.asarray(y_true, dtype=np.int64).ravel()
    p = np.asarray(y_pred, dtype=np.int64).ravel()
    if t.shape != p.shape:
        raise ShapeError("y_true and y_pred lengths differ")
    for arr in (t, p):
        if arr.size and (arr.min() < 1 or arr.max() > n_classes):
            raise InvalidArgument(f"labels must lie in 1..{n_classes}")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (t - 1, p - 1), 1)
    return ConfusionMatrix(counts)


def accuracy(y_true, y_pred) -> float:
    t = np.asarray(y_true).ravel()
    p = np.asarray(y_pred).ravel()
    if t.shape != p.shape:
        raise ShapeError("y_true and y_pred lengths differ")
    return float(np.mean(t == p))


def roc_points(scores, y_true) -> np.ndarray:
    """(fpr, tpr) rows for thresholds at each unique score, descending.

    A sample is called positive when its score >= threshold.  The curve
    starts at (0, 0); the lowest threshold yields (1, 1).
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    yt = np.asarray(y_true).ravel().astype(bool)
    if s.shape != yt.shape:
        raise ShapeError("scores and labels lengths differ")
    n_pos, n_neg = int(yt.sum()), int((~yt).sum())
    if n_pos == 0 or n_neg == 0:
        raise InvalidArgument("ROC needs both positive and negative samples")
    pts = [(0.0, 0.0)]
    for thr in np.unique(s)[::-1]:
        pred = s >= thr
        pts.append((np.sum(pred & ~yt) / n_neg, np.sum(pred & yt) / n_pos))
    return np.array(pts)


def auc(points) -> float:
    pts = np.asarray(points, dtype=np.float64)
    return float(np.sum(np.diff(pts[:, 0]) * (pts[1:, 1] + pts[:-1, 1]) / 2.0))


def roc_one_vs_rest(proba, y_true, n_classes) -> list[np.ndarray | None]:
    """Per-class ROC from a (samples x classes) score matrix; None when a
    class has no positives or no negatives in ``y_true``."""
    proba = np.asarray(proba, dtype=np.float64)
    y = np.asarray(y_true).ravel()
    out = []
    for c in range(1, n_classes + 1):
        pos = y == c
        out.append(roc_points(proba[:, c - 1], pos) if 0 < pos.sum() < len(y) else None)
    return out


def loss_01(model, ds) -> float:
    """Misclassification rate of ``model`` on ``ds``."""
    return 1.0 - accuracy(ds.y, model.predict(ds.X))
