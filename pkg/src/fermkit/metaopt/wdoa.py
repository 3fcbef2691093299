"""Weevil damage optimization for clustering-based contrast enhancement."""

from __future__ import annotations

import numpy as np

from ..enhance import adjust_window
from ..errors import InvalidArgument
from ..imgcore import is_rgb, to_gray
from .common import cluster_cost, n_keep, roulette_select, sort_population

DAMAGE_RATE = 0.3
SNOUT_POWER = 0.8
FLY_POWER = 0.003
P_MUTATION = 0.1


def wdoa_optimize(X, k=6, max_it=100, n_pop=10, seed=0, callback=None):
    """Cluster the 1-D data X with k scalar centers.

    Returns (best_position (k,), best-cost history).  ``callback(it,
    positions, costs)`` sees the population after every iteration.
    """
    X = np.asarray(X, dtype=np.float64).ravel()
    rng = np.random.default_rng(seed)
    lo, hi = float(X.min()), float(X.max())
    mu = np.linspace(1.0, 0.0, n_pop)
    mu_two = 1.0 - mu
    n_old = n_keep(DAMAGE_RATE, n_pop)
    n_new = n_pop - n_old

    def cost(p):
        return cluster_cost(p, X)[0]

    pos = rng.uniform(lo, hi, size=(n_pop, k))
    costs = np.array([cost(p) for p in pos])
    pos, costs = sort_population(pos, costs)
    history = []
    for it in range(max_it):
        new = pos.copy()
        for i in range(n_pop):
            for v in range(k):
                if rng.random() <= mu_two[i]:
                    w = mu.copy()
                    w[i] = 0.0
                    j = roulette_select(w, rng)
                    new[i, v] = pos[i, v] + SNOUT_POWER * (pos[j, v] - pos[i, v] + FLY_POWER)
                # the mutation step leaves the position as it is, but still draws
                rng.random() <= P_MUTATION
            new[i] = np.clip(new[i], lo, hi)
        new_costs = np.array([cost(p) for p in new])
        new, new_costs = sort_population(new, new_costs)
        pos = np.vstack([pos[:n_old], new[:n_new]])
        costs = np.concatenate([costs[:n_old], new_costs[:n_new]])
        pos, costs = sort_population(pos, costs)
        history.append(float(costs[0]))
        if callback is not None:
            callback(it, pos, costs)
    return pos[0].copy(), np.array(history)


def wdoa_enhance(img, k=6, max_it=100, n_pop=10, seed=0, callback=None):
    """Contrast stretch with windows taken from the sorted WDOA centers.

    Gray images use [t1, t4]; RGB channels use [t1, t4], [t2, t5], [t3, t6].
    A flat image comes back unchanged with an empty history.
    """
    if k != 6:
        raise InvalidArgument("the 2x3 window mapping needs k = 6")
    img = np.asarray(img, dtype=np.float64)
    gray = to_gray(img) if is_rgb(img) else img
    if gray.ndim != 2:
        raise InvalidArgument("expected a gray or RGB image")
    if gray.max() <= gray.min():
        return img.copy(), np.zeros(0)
    best, history = wdoa_optimize(gray, k, max_it, n_pop, seed, callback)
    t = np.sort(best)
    if img.ndim == 2:
        return adjust_window(img, t[0], t[3]), history
    out = np.stack([adjust_window(img[..., c], t[c], t[c + 3]) for c in range(3)], axis=-1)
    return out, history
