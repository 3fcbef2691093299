"""FeatureMatrix: samples x features with optional class labels."""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InvalidArgument, ShapeError, UnsupportedFormat

BINARY_MAGIC = b"FMX1"


@dataclass
class FeatureMatrix:
    values: np.ndarray
    labels: np.ndarray | None = None
    names: list[str] | None = None

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        if self.values.ndim != 2:
            raise ShapeError("feature matrix must be 2-D")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64).ravel()
            if self.labels.shape[0] != self.values.shape[0]:
                raise ShapeError("labels length must equal the number of rows")
        if self.names is not None and len(self.names) != self.values.shape[1]:
            raise ShapeError("one name per column is required")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def with_labels(self, labels) -> "FeatureMatrix":
        return FeatureMatrix(self.values, labels, self.names)

    def take_columns(self, idx) -> "FeatureMatrix":
        idx = np.asarray(idx, dtype=np.intp)
        names = None if self.names is None else [self.names[i] for i in idx]
        return FeatureMatrix(self.values[:, idx], self.labels, names)

    # -- CSV ---------------------------------------------------------------
    def to_csv(self, path=None) -> str:
        """Comma-separated, header row, label as final column when present."""
        names = self.names or [f"f{i}" for i in range(self.n_cols)]
        header = list(names) + (["label"] if self.labels is not None else [])
        buf = io.StringIO(newline="")
        buf.write(",".join(header) + "\n")
        for r in range(self.n_rows):
            cells = [repr(float(v)) for v in self.values[r]]
            if self.labels is not None:
                cells.append(str(int(self.labels[r])))
            buf.write(",".join(cells) + "\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8", newline="")
        return text

    @classmethod
    def from_csv(cls, path) -> "FeatureMatrix":
        return cls.parse_csv(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def parse_csv(cls, text: str) -> "FeatureMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise UnsupportedFormat("empty feature CSV")
        header = lines[0].split(",")
        has_label = header[-1] == "label"
        rows = [ln.split(",") for ln in lines[1:]]
        if any(len(r) != len(header) for r in rows):
            raise ShapeError("ragged feature CSV")
        data = np.array([[float(c) for c in r] for r in rows], dtype=np.float64).reshape(len(rows), len(header))
        if has_label:
            return cls(data[:, :-1], data[:, -1].astype(np.int64), header[:-1])
        return cls(data, None, header)

    # -- binary ------------------------------------------------------------
    def to_bytes(self) -> bytes:
        """Magic, rows, cols, label flag, then little-endian float64 data
        and (if present) int64 labels."""
        flag = 1 if self.labels is not None else 0
        out = [BINARY_MAGIC, struct.pack("<QQB", self.n_rows, self.n_cols, flag)]
        out.append(self.values.astype("<f8").tobytes(order="C"))
        if flag:
            out.append(self.labels.astype("<i8").tobytes())
        return b"".join(out)

    @classmethod
    def from_bytes(cls, raw: bytes) -> "FeatureMatrix":
        if raw[:4] != BINARY_MAGIC:
            raise UnsupportedFormat("not a binary feature matrix")
        rows, cols, flag = struct.unpack_from("<QQB", raw, 4)
        off = 4 + struct.calcsize("<QQB")
        n = rows * cols
        if len(raw) < off + 8 * n + (8 * rows if flag else 0):
            raise UnsupportedFormat("truncated binary feature matrix")
        values = np.frombuffer(raw, dtype="<f8", count=n, offset=off).reshape(rows, cols)
        labels = None
        if flag:
            labels = np.frombuffer(raw, dtype="<i8", count=rows, offset=off + 8 * n)
        return cls(values.astype(np.float64), labels)


def stack_features(parts) -> FeatureMatrix:
    """Concatenate matrices column-wise in argument order."""
    parts = list(parts)
    if not parts:
        raise InvalidArgument("nothing to stack")
    rows = {p.n_rows for p in parts}
    if len(rows) != 1:
        raise ShapeError(f"row counts differ: {sorted(rows)}")
    labelled = [p.labels for p in parts if p.labels is not None]
    if len(labelled) > 1:
        raise InvalidArgument("at most one part may carry labels")
    if all(p.names is not None for p in parts):
        names = [n for p in parts for n in p.names]
    else:
        names = None
    return FeatureMatrix(np.hstack([p.values for p in parts]), labelled[0] if labelled else None, names)
