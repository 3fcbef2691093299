"""k-NN, Gaussian naive Bayes, CART and LDA classifiers.

Every model exposes ``predict(X)`` (labels 1..C), ``predict_proba(X)``
(samples x C scores, rows summing to 1) and a versioned JSON form.
Ties always resolve toward the smaller class index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgument, ShapeError
from .dataset import LabeledDataset

SCHEMA = 1
GNB_VAR_FLOOR = 1e-9


def _check_X(X, n_features):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != n_features:
        raise ShapeError(f"model expects {n_features} features, got {X.shape[1]}")
    return X


def _softmax(z):
    z = z - np.max(z, axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _argmax_label(scores):
    # np.argmax returns the first maximum -> smallest class index on ties
    return np.argmax(scores, axis=1).astype(np.int64) + 1


class _Model:
    kind = ""

    def predict(self, X) -> np.ndarray:
        return _argmax_label(self.predict_proba(X))

    def to_json(self) -> str:
        return json.dumps({"schema": SCHEMA, "kind": self.kind, **self._state()})


@dataclass
class KnnModel(_Model):
    X: np.ndarray
    y: np.ndarray
    n_classes: int
    k: int = 5
    kind = "knn"

    def neighbors(self, X) -> np.ndarray:
        X = _check_X(X, self.X.shape[1])
        d2 = ((X[:, None, :] - self.X[None, :, :]) ** 2).sum(-1)
        k = min(self.k, self.X.shape[0])
        return np.argsort(d2, axis=1, kind="stable")[:, :k]

    def predict_proba(self, X) -> np.ndarray:
        nb = self.neighbors(X)
        votes = np.zeros((nb.shape[0], self.n_classes))
        for r, row in enumerate(nb):
            votes[r] = np.bincount(self.y[row] - 1, minlength=self.n_classes)
        return votes / nb.shape[1]

    def _state(self):
        return {"k": self.k, "n_classes": self.n_classes, "X": self.X.tolist(), "y": self.y.tolist()}


@dataclass
class GnbModel(_Model):
    priors: np.ndarray
    means: np.ndarray  # C x d
    variances: np.ndarray  # C x d
    kind = "gnb"

    @property
    def n_classes(self):
        return self.priors.shape[0]

    def log_joint(self, X) -> np.ndarray:
        X = _check_X(X, self.means.shape[1])
        with np.errstate(divide="ignore"):
            lp = np.log(self.priors)
        ll = -0.5 * (np.log(2 * np.pi * self.variances)[None]
                     + (X[:, None, :] - self.means[None]) ** 2 / self.variances[None]).sum(-1)
        return lp[None] + ll

    def predict_proba(self, X) -> np.ndarray:
        return _softmax(self.log_joint(X))

    def _state(self):
        return {"priors": self.priors.tolist(), "means": self.means.tolist(), "variances": self.variances.tolist()}


@dataclass
class LdaModel(_Model):
    means: np.ndarray  # C x d
    cov_inv: np.ndarray
    priors: np.ndarray
    kind = "lda"

    @property
    def n_classes(self):
        return self.priors.shape[0]

    def discriminants(self, X) -> np.ndarray:
        X = _check_X(X, self.means.shape[1])
        w = self.means @ self.cov_inv  # C x d
        b = -0.5 * np.sum(w * self.means, axis=1)
        with np.errstate(divide="ignore"):
            b = b + np.log(self.priors)
        return X @ w.T + b[None]

    def predict_proba(self, X) -> np.ndarray:
        return _softmax(self.discriminants(X))

    def _state(self):
        return {"means": self.means.tolist(), "cov_inv": self.cov_inv.tolist(), "priors": self.priors.tolist()}


@dataclass
class CartModel(_Model):
    """Binary tree in flat arrays; leaves have feature == -1."""

    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    counts: list = field(default_factory=list)  # per-node class counts
    n_features: int = 0
    kind = "cart"

    @property
    def n_classes(self):
        return len(self.counts[0])

    @property
    def depth(self) -> int:
        def d(i):
            return 0 if self.feature[i] < 0 else 1 + max(d(self.left[i]), d(self.right[i]))
        return d(0)

    def leaf_index(self, X) -> np.ndarray:
        X = _check_X(X, self.n_features)
        out = np.empty(X.shape[0], dtype=np.intp)
        for r, x in enumerate(X):
            i = 0
            while self.feature[i] >= 0:
                i = self.left[i] if x[self.feature[i]] <= self.threshold[i] else self.right[i]
            out[r] = i
        return out

    def predict_proba(self, X) -> np.ndarray:
        cnt = np.asarray(self.counts, dtype=np.float64)[self.leaf_index(X)]
        return cnt / cnt.sum(axis=1, keepdims=True)

    def _state(self):
        return {"feature": self.feature, "threshold": self.threshold, "left": self.left,
                "right": self.right, "counts": self.counts, "n_features": self.n_features}


def _gini(counts):
    tot = counts.sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = counts / tot[..., None]
    return np.where(tot > 0, 1.0 - np.sum(p * p, axis=-1), 0.0)


def _best_split(X, y0, n_classes, min_leaf):
    """(feature, threshold, gain) maximizing the Gini decrease, or None.

    Zero-gain splits are still returned so that greedy growth can reach
    interactions such as XOR.  Ties go to the lowest feature, then the
    lowest threshold.
    """
    n, d = X.shape
    onehot = np.eye(n_classes)[y0]
    parent = _gini(onehot.sum(axis=0))
    best = None
    for f in range(d):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        cum = np.cumsum(onehot[order], axis=0)
        pos = np.nonzero(xs[1:] > xs[:-1])[0]  # split after index pos
        pos = pos[(pos + 1 >= min_leaf) & (n - pos - 1 >= min_leaf)]
        if pos.size == 0:
            continue
        left = cum[pos]
        right = cum[-1] - left
        nl = (pos + 1).astype(np.float64)
        child = (nl * _gini(left) + (n - nl) * _gini(right)) / n
        gain = parent - child
        k = int(np.argmax(gain))
        if best is None or gain[k] > best[2] + 1e-15:
            best = (f, 0.5 * (xs[pos[k]] + xs[pos[k] + 1]), float(gain[k]))
    return best


def _grow_cart(X, y, n_classes, max_depth, min_leaf) -> CartModel:
    m = CartModel(n_features=X.shape[1])

    def node(idx, depth):
        i = len(m.feature)
        cnt = np.bincount(y[idx] - 1, minlength=n_classes)
        m.feature.append(-1)
        m.threshold.append(0.0)
        m.left.append(-1)
        m.right.append(-1)
        m.counts.append(cnt.tolist())
        if np.count_nonzero(cnt) <= 1 or (max_depth is not None and depth >= max_depth):
            return i
        split = _best_split(X[idx], y[idx] - 1, n_classes, min_leaf)
        if split is None:
            return i
        f, thr, _ = split
        go_left = X[idx, f] <= thr
        m.feature[i] = int(f)
        m.threshold[i] = float(thr)
        m.left[i] = node(idx[go_left], depth + 1)
        m.right[i] = node(idx[~go_left], depth + 1)
        return i

    node(np.arange(X.shape[0]), 0)
    return m


def _class_means(ds):
    return np.array([ds.X[ds.y == c].mean(axis=0) if np.any(ds.y == c) else np.zeros(ds.n_features)
                     for c in range(1, ds.n_classes + 1)])


def train(ds: LabeledDataset, algo: str, **params):
    """Fit one of 'knn', 'gnb', 'cart', 'lda' (or 'mlp', see ``mlp_train``)."""
    if algo == "mlp":
        from .mlp import mlp_train
        return mlp_train(ds, **params)[0]
    present = np.count_nonzero(ds.class_counts())
    if algo != "gnb" and present < 2:
        raise InvalidArgument(f"{algo} needs at least two classes in the training data")
    priors = ds.class_counts() / ds.n_samples
    if algo == "knn":
        k = int(params.get("k", 5))
        if k < 1:
            raise InvalidArgument("k must be >= 1")
        return KnnModel(ds.X.copy(), ds.y.copy(), ds.n_classes, k)
    if algo == "gnb":
        means = _class_means(ds)
        var = np.array([ds.X[ds.y == c].var(axis=0) if np.any(ds.y == c) else np.ones(ds.n_features)
                        for c in range(1, ds.n_classes + 1)])
        floor = float(params.get("var_floor", GNB_VAR_FLOOR))
        return GnbModel(priors, means, np.maximum(var, floor))
    if algo == "cart":
        max_depth = params.get("max_depth", 10)
        min_leaf = int(params.get("min_leaf", 1))
        if min_leaf < 1:
            raise InvalidArgument("min_leaf must be >= 1")
        return _grow_cart(ds.X, ds.y, ds.n_classes, max_depth, min_leaf)
    if algo == "lda":
        ridge = float(params.get("ridge", 1e-6))
        means = _class_means(ds)
        resid = ds.X - means[ds.y - 1]
        dof = max(ds.n_samples - present, 1)
        cov = resid.T @ resid / dof + ridge * np.eye(ds.n_features)
        return LdaModel(means, np.linalg.pinv(cov, hermitian=True), priors)
    raise InvalidArgument(f"unknown classifier {algo!r}")


def model_from_json(text: str):
    d = json.loads(text)
    if d.get("schema") != SCHEMA:
        raise InvalidArgument(f"unsupported model schema {d.get('schema')!r}")
    kind = d["kind"]
    a = lambda k: np.asarray(d[k], dtype=np.float64)  # noqa: E731
    if kind == "knn":
        return KnnModel(a("X"), np.asarray(d["y"], dtype=np.int64), int(d["n_classes"]), int(d["k"]))
    if kind == "gnb":
        return GnbModel(a("priors"), a("means"), a("variances"))
    if kind == "lda":
        return LdaModel(a("means"), a("cov_inv"), a("priors"))
    if kind == "cart":
        return CartModel(d["feature"], d["threshold"], d["left"], d["right"], d["counts"], int(d["n_features"]))
    if kind == "mlp":
        from .mlp import MlpModel
        return MlpModel.from_state(d)
    raise InvalidArgument(f"unknown model kind {kind!r}")
