"""Two-column CSV series (ROC points, best-cost histories)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import InvalidArgument, UnsupportedFormat


def _fmt(v) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)


def curve_to_csv(xy, header=("x", "y")) -> str:
    xy = np.asarray(xy, dtype=np.float64)
    if xy.ndim != 2 or xy.shape[1] != 2 or xy.shape[0] == 0:
        raise InvalidArgument("expected a non-empty (n, 2) series")
    lines = [",".join(header)] + [f"{_fmt(a)},{_fmt(b)}" for a, b in xy]
    return "\n".join(lines) + "\n"


def history_to_xy(history) -> np.ndarray:
    h = np.asarray(history, dtype=np.float64).ravel()
    return np.column_stack([np.arange(1, h.size + 1), h])


def emit_curves(series, path, kind="roc") -> Path:
    """Write an ROC (fpr, tpr) or a history (iteration, cost) CSV.

    ROC rows are sorted by x (then y) so that x is monotone.
    """
    if kind == "roc":
        xy = np.asarray(series, dtype=np.float64)
        if xy.size == 0:
            raise InvalidArgument("empty ROC")
        xy = xy[np.lexsort((xy[:, 1], xy[:, 0]))]
        text = curve_to_csv(xy, ("fpr", "tpr"))
    elif kind == "history":
        text = curve_to_csv(history_to_xy(series), ("iteration", "cost"))
    else:
        raise InvalidArgument(f"unknown curve kind {kind!r}")
    path = Path(path)
    path.write_text(text, encoding="utf-8", newline="")
    return path


def read_curve(path):
    """Returns (header tuple, (n, 2) array)."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise UnsupportedFormat(f"{path}: empty curve file")
    header = tuple(lines[0].split(","))
    if len(header) != 2:
        raise UnsupportedFormat(f"{path}: expected two columns")
    rows = [[float(c) for c in ln.split(",")] for ln in lines[1:]]
    return header, np.array(rows, dtype=np.float64).reshape(-1, 2)
