"""One-hidden-layer pattern network: tanh hidden units, softmax output.

Two full-batch trainers are provided: fixed-step gradient descent and
resilient backpropagation (iRprop-).  Inputs are min-max mapped to
[-1, 1] using the training rows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgument, ShapeError
from .dataset import LabeledDataset
from .models import SCHEMA, _Model, _argmax_label, _softmax

RPROP_DEFAULTS = {"eta_plus": 1.2, "eta_minus": 0.5, "delta0": 0.07, "delta_max": 50.0, "delta_min": 1e-6}


@dataclass
class MlpModel(_Model):
    W1: np.ndarray  # hidden x d
    b1: np.ndarray
    W2: np.ndarray  # C x hidden
    b2: np.ndarray
    x_min: np.ndarray
    x_max: np.ndarray
    kind = "mlp"

    @property
    def n_classes(self):
        return self.W2.shape[0]

    @property
    def n_features(self):
        return self.W1.shape[1]

    def scale(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ShapeError(f"model expects {self.n_features} features, got {X.shape[1]}")
        span = self.x_max - self.x_min
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, 2.0 * (X - self.x_min) / safe - 1.0, 0.0)

    def predict_proba(self, X) -> np.ndarray:
        h = np.tanh(self.scale(X) @ self.W1.T + self.b1)
        return _softmax(h @ self.W2.T + self.b2)

    def predict(self, X) -> np.ndarray:
        return _argmax_label(self.predict_proba(X))

    # parameters as one flat vector (W1, b1, W2, b2)
    def get_params(self) -> np.ndarray:
        return np.concatenate([self.W1.ravel(), self.b1, self.W2.ravel(), self.b2])

    def set_params(self, theta) -> None:
        h, d = self.W1.shape
        c = self.W2.shape[0]
        theta = np.asarray(theta, dtype=np.float64).ravel()
        if theta.size != h * d + h + c * h + c:
            raise ShapeError(f"expected {h * d + h + c * h + c} parameters, got {theta.size}")
        i = 0
        self.W1 = theta[i:i + h * d].reshape(h, d).copy(); i += h * d
        self.b1 = theta[i:i + h].copy(); i += h
        self.W2 = theta[i:i + c * h].reshape(c, h).copy(); i += c * h
        self.b2 = theta[i:i + c].copy()

    def _state(self):
        return {k: getattr(self, k).tolist() for k in ("W1", "b1", "W2", "b2", "x_min", "x_max")}

    @classmethod
    def from_state(cls, d) -> "MlpModel":
        return cls(*(np.asarray(d[k], dtype=np.float64) for k in ("W1", "b1", "W2", "b2", "x_min", "x_max")))

    def to_json(self) -> str:
        return json.dumps({"schema": SCHEMA, "kind": self.kind, **self._state()})


def one_hot(y, n_classes) -> np.ndarray:
    return np.eye(n_classes)[np.asarray(y, dtype=np.int64) - 1]


def loss_and_grad(model: MlpModel, Xs, T):
    """Mean cross-entropy and its gradient (flat) on pre-scaled inputs Xs."""
    n = Xs.shape[0]
    h = np.tanh(Xs @ model.W1.T + model.b1)
    z = h @ model.W2.T + model.b2
    zmax = z.max(axis=1, keepdims=True)
    logp = z - zmax - np.log(np.exp(z - zmax).sum(axis=1, keepdims=True))
    loss = -np.sum(T * logp) / n
    dz = (np.exp(logp) - T) / n
    gW2 = dz.T @ h
    gb2 = dz.sum(axis=0)
    da = (dz @ model.W2) * (1.0 - h * h)
    gW1 = da.T @ Xs
    gb1 = da.sum(axis=0)
    return float(loss), np.concatenate([gW1.ravel(), gb1, gW2.ravel(), gb2])


def numeric_grad(model: MlpModel, Xs, T, h=1e-5) -> np.ndarray:
    """Central finite differences of the loss w.r.t. every parameter."""
    theta = model.get_params()
    g = np.zeros_like(theta)
    for i in range(theta.size):
        for sgn in (1.0, -1.0):
            t = theta.copy()
            t[i] += sgn * h
            model.set_params(t)
            g[i] += sgn * loss_and_grad(model, Xs, T)[0]
    model.set_params(theta)
    return g / (2 * h)


def init_mlp(n_features, hidden, n_classes, rng, x_min=None, x_max=None) -> MlpModel:
    """Weights and biases ~ U(-0.5, 0.5) / sqrt(fan_in)."""
    def u(shape, fan_in):
        return rng.uniform(-0.5, 0.5, size=shape) / np.sqrt(fan_in)

    x_min = -np.ones(n_features) if x_min is None else x_min
    x_max = np.ones(n_features) if x_max is None else x_max
    return MlpModel(u((hidden, n_features), n_features), u(hidden, n_features),
                    u((n_classes, hidden), hidden), u(n_classes, hidden), x_min, x_max)


@dataclass
class TrainHistory:
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    best_epoch: int = 0
    stop_reason: str = ""
    train_idx: np.ndarray | None = None
    val_idx: np.ndarray | None = None
    test_idx: np.ndarray | None = None

    @property
    def epochs(self) -> int:
        return len(self.train_loss) - 1


def split_three(n, fractions, rng):
    """Shuffled train/val/test index arrays; a split gets
    round(n * fraction) rows and must be non-empty when its fraction > 0."""
    fr = np.asarray(fractions, dtype=np.float64)
    if fr.shape != (3,) or np.any(fr < 0) or abs(fr.sum() - 1.0) > 1e-9 or fr[0] <= 0:
        raise InvalidArgument("split fractions must be three non-negative numbers summing to 1, train > 0")
    n_val = int(np.floor(n * fr[1] + 0.5))
    n_test = int(np.floor(n * fr[2] + 0.5))
    n_train = n - n_val - n_test
    if n_train < 1 or (fr[1] > 0 and n_val < 1) or (fr[2] > 0 and n_test < 1):
        raise InvalidArgument(f"split {tuple(fr)} leaves a requested side empty for n={n}")
    perm = rng.permutation(n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:n_train + n_val]), np.sort(perm[n_train + n_val:])


def mlp_train(ds: LabeledDataset, hidden=10, trainer="rprop", epochs=1000, lr=0.01,
              split=(0.7, 0.15, 0.15), seed=0, patience=6, min_grad=1e-6, rprop=None):
    """Train the pattern network; returns (model, TrainHistory).

    Early stopping halts when the validation loss has not improved for
    ``patience`` consecutive epochs and restores the best-validation
    weights.  With an empty validation split training runs to ``epochs``
    or until the gradient norm drops below ``min_grad``.
    """
    if hidden < 1:
        raise InvalidArgument("hidden must be >= 1")
    if trainer not in ("gd", "rprop"):
        raise InvalidArgument(f"unknown trainer {trainer!r}")
    if epochs < 0:
        raise InvalidArgument("epochs must be >= 0")
    rng = np.random.default_rng(seed)
    tr, va, te = split_three(ds.n_samples, split, rng)
    X_tr = ds.X[tr]
    model = init_mlp(ds.n_features, hidden, ds.n_classes, rng, X_tr.min(axis=0), X_tr.max(axis=0))
    T = one_hot(ds.y, ds.n_classes)
    Xs = model.scale(ds.X)
    hist = TrainHistory(train_idx=tr, val_idx=va, test_idx=te)

    def val_loss():
        return loss_and_grad(model, Xs[va], T[va])[0] if va.size else float("nan")

    loss, grad = loss_and_grad(model, Xs[tr], T[tr])
    hist.train_loss.append(loss)
    hist.val_loss.append(val_loss())
    best_val, best_theta, since_best = hist.val_loss[0], model.get_params(), 0
    rp = {**RPROP_DEFAULTS, **(rprop or {})}
    step = np.full(grad.size, rp["delta0"])
    prev = np.zeros(grad.size)
    hist.stop_reason = "max_epochs"
    for ep in range(1, epochs + 1):
        if np.linalg.norm(grad) < min_grad:
            hist.stop_reason = "min_grad"
            break
        theta = model.get_params()
        if trainer == "gd":
            theta -= lr * grad
        else:
            sgn = grad * prev
            step = np.where(sgn > 0, np.minimum(step * rp["eta_plus"], rp["delta_max"]), step)
            step = np.where(sgn < 0, np.maximum(step * rp["eta_minus"], rp["delta_min"]), step)
            g_eff = np.where(sgn < 0, 0.0, grad)
            theta -= np.sign(g_eff) * step
            prev = g_eff
        model.set_params(theta)
        loss, grad = loss_and_grad(model, Xs[tr], T[tr])
        hist.train_loss.append(loss)
        v = val_loss()
        hist.val_loss.append(v)
        if va.size:
            if v < best_val:
                best_val, best_theta, since_best, hist.best_epoch = v, theta.copy(), 0, ep
            else:
                since_best += 1
                if since_best >= patience:
                    hist.stop_reason = "validation_stop"
                    model.set_params(best_theta)
                    break
        else:
            hist.best_epoch = ep
    return model, hist
