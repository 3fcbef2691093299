"""Bee-eater hunting optimizer for color clustering (segmentation + quantization)."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument
from ..imgcore import as_rgb
from .common import cluster_cost, n_keep, roulette_select, sort_population

DAMAGE_RATE = 0.2
PEAK_POWER = 0.8
ADJUST_RATE = 0.03
PYR = -0.2
P_MUTATION = 0.1


def beh_optimize(X, k=5, max_it=200, n_pop=20, seed=0, callback=None):
    """Cluster rows of X (n x d) with k centers.

    Returns (best centers (k x d), best assignments (n,), history).  New
    candidates are scored at ``position + 0.03 * range`` while the stored
    position stays unshifted; the initial population is scored unshifted.
    Coordinates are visited in column-major order.
    """
    X = np.asarray(X, dtype=np.float64)
    if k < 2:
        raise InvalidArgument("k must be >= 2")
    rng = np.random.default_rng(seed)
    d = X.shape[1]
    lo = np.tile(X.min(axis=0), (k, 1))
    hi = np.tile(X.max(axis=0), (k, 1))
    adjust = ADJUST_RATE * (hi - lo)
    mu = np.linspace(1.0, 0.0, n_pop)
    mu_two = 1.0 - mu
    n_old = n_keep(DAMAGE_RATE, n_pop)
    n_new = n_pop - n_old
    n_var = k * d

    pos = rng.uniform(lo, hi, size=(n_pop, k, d))
    evals = [cluster_cost(p, X) for p in pos]
    costs = np.array([e[0] for e in evals])
    assign = np.array([e[1] for e in evals])
    pos, costs, assign = sort_population(pos, costs, assign)
    history = []
    for it in range(max_it):
        new = pos.copy()
        for i in range(n_pop):
            flat_old = pos[i].ravel(order="F")
            flat_new = new[i].ravel(order="F").copy()
            for v in range(n_var):
                if rng.random() <= mu_two[i]:
                    w = mu.copy()
                    w[i] = 0.0
                    j = roulette_select(w, rng)
                    other = pos[j].ravel(order="F")[v]
                    flat_new[v] = flat_old[v] * PYR + PEAK_POWER * (other - flat_old[v])
                if rng.random() <= P_MUTATION:
                    flat_new[v] = flat_new[v] + PYR
            new[i] = np.clip(flat_new.reshape((k, d), order="F"), lo, hi)
        evals = [cluster_cost(p + adjust, X) for p in new]
        new_costs = np.array([e[0] for e in evals])
        new_assign = np.array([e[1] for e in evals])
        new, new_costs, new_assign = sort_population(new, new_costs, new_assign)
        pos = np.concatenate([pos[:n_old], new[:n_new]])
        costs = np.concatenate([costs[:n_old], new_costs[:n_new]])
        assign = np.concatenate([assign[:n_old], new_assign[:n_new]])
        pos, costs, assign = sort_population(pos, costs, assign)
        history.append(float(costs[0]))
        if callback is not None:
            callback(it, pos, costs)
    return pos[0].copy(), assign[0].copy(), np.array(history)


def beh_segment(img, k=5, max_it=200, n_pop=20, seed=0, callback=None):
    """Returns (quantized RGB image, label image in 1..k, history)."""
    img = as_rgb(img)
    h, w, _ = img.shape
    X = img.reshape(-1, 3)
    centers, assign, history = beh_optimize(X, k, max_it, n_pop, seed, callback)
    quantized = centers[assign].reshape(h, w, 3)
    labels = (assign + 1).reshape(h, w)
    return quantized, labels, history
