"""Neural gas network and nearest-codebook image segmentation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument
from ..imgcore import as_gray

NGN_DEFAULTS = {
    "N": 8, "max_it": 100, "tmax": 100_000,
    "eps_i": 0.3, "eps_f": 0.02, "lam_i": 2.0, "lam_f": 0.1, "T_i": 5.0, "T_f": 10.0,
}


@dataclass
class NgnNetwork:
    w: np.ndarray  # N x d codebooks
    C: np.ndarray  # N x N links (0/1)
    t: np.ndarray  # N x N link ages


def ngn_train(X, params=None, seed=0, on_epoch=None) -> NgnNetwork:
    """Rank-based neural gas with aging links.

    Samples are shuffled once; eps, lambda and the age limit T follow
    ``v_i * (v_f / v_i) ** (tt / tmax)`` in the global step tt.
    """
    p = {**NGN_DEFAULTS, **(params or {})}
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.size == 0:
        raise InvalidArgument("no data to train on")
    n_units = int(p["N"])
    if n_units < 1:
        raise InvalidArgument("N must be >= 1")
    rng = np.random.default_rng(seed)
    X = X[rng.permutation(X.shape[0])]
    lo, hi = X.min(axis=0), X.max(axis=0)
    w = np.array([rng.uniform(lo, hi) for _ in range(n_units)]).reshape(n_units, X.shape[1])
    C = np.zeros((n_units, n_units))
    t = np.zeros((n_units, n_units))
    tmax = float(p["tmax"])
    eps_i, eps_r = p["eps_i"], p["eps_f"] / p["eps_i"]
    lam_i, lam_r = p["lam_i"], p["lam_f"] / p["lam_i"]
    T_i, T_r = p["T_i"], p["T_f"] / p["T_i"]
    ranks = np.empty(n_units)
    tt = 0
    for it in range(int(p["max_it"])):
        for x in X:
            d = np.sqrt(((w - x) ** 2).sum(axis=1))
            order = np.argsort(d, kind="stable")
            frac = tt / tmax
            eps = eps_i * eps_r ** frac
            lam = lam_i * lam_r ** frac
            T = T_i * T_r ** frac
            ranks[order] = np.arange(n_units)
            w += (eps * np.exp(-ranks / lam))[:, None] * (x - w)
            tt += 1
            if n_units < 2:
                continue
            i, j = order[0], order[1]
            C[i, j] = C[j, i] = 1.0
            t[i, j] = t[j, i] = 0.0
            t[i, :] += 1.0
            t[:, i] += 1.0
            old = t[i, :] > T
            C[i, old] = 0.0
            C[old, i] = 0.0
        if on_epoch is not None:
            on_epoch(it, w, C, t)
    return NgnNetwork(w, C, t)


def ngn_segment(img, N=8, params=None, seed=0):
    """Returns (label image in 1..N, quantized image).

    Codebooks are trained on pixel intensities and ranked by intensity;
    each pixel takes the rank (1-based) of its nearest codebook, and the
    quantized image takes that codebook's intensity.
    """
    img = as_gray(img)
    if N < 2:
        raise InvalidArgument("N must be >= 2")
    net = ngn_train(img.reshape(-1, 1), {**(params or {}), "N": N}, seed)
    cb = net.w[:, 0]
    order = np.argsort(cb, kind="stable")
    rank = np.empty(N, dtype=np.int64)
    rank[order] = np.arange(1, N + 1)
    nearest = np.argmin(np.abs(img.reshape(-1, 1) - cb[None, :]), axis=1)
    labels = rank[nearest].reshape(img.shape)
    quantized = np.clip(cb[nearest], 0.0, 1.0).reshape(img.shape)
    return labels, quantized
