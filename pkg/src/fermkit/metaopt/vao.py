"""Victoria amazonica optimization for wrapper feature selection.

Candidates are random-key vectors: the first ``nf`` indices of their sort
order form the selected column set.  Cost is a weighted train/held-out
mean squared error of a small MLP averaged over several runs.
"""

from __future__ import annotations

import numpy as np

from ..classify.dataset import LabeledDataset
from ..classify.mlp import mlp_train, one_hot
from ..errors import InvalidArgument

VAO_DEFAULTS = {
    "max_it": 50, "n_pop": 3, "var_min": -10.0, "var_max": 10.0,
    "omega": 5.0, "psi": 4.0, "lam": 2.0, "mu": 0.2, "mu_damp": 0.98,
    "w_train": 0.8, "n_run": 3, "hidden": 10, "epochs": 1000,
}


def keys_to_subset(u, nf) -> np.ndarray:
    return np.argsort(u, kind="stable")[:nf]


def feature_selection_cost(u, nf, ds: LabeledDataset, rng, params=None):
    """(cost, selected columns) for one random-key vector."""
    p = {**VAO_DEFAULTS, **(params or {})}
    sel = keys_to_subset(u, nf)
    sub = LabeledDataset(ds.X[:, sel], ds.y, ds.n_classes)
    T = one_hot(ds.y, ds.n_classes)
    runs = []
    for _ in range(int(p["n_run"])):
        seed = int(rng.integers(0, 2**63 - 1))
        model, hist = mlp_train(sub, hidden=int(p["hidden"]), trainer="rprop", epochs=int(p["epochs"]),
                                split=(0.70, 0.15, 0.15), seed=seed)
        err = (model.predict_proba(sub.X) - T) ** 2
        held = np.concatenate([hist.test_idx, hist.val_idx])
        e_train = float(err[hist.train_idx].mean())
        e_test = float(err[held].mean()) if held.size else e_train
        runs.append(p["w_train"] * e_train + (1.0 - p["w_train"]) * e_test)
    return float(np.mean(runs)), np.sort(sel)


def vao_select(ds: LabeledDataset, nf, params=None, seed=0, callback=None):
    """Returns (sorted selected column indices, best-cost history)."""
    p = {**VAO_DEFAULTS, **(params or {})}
    n_var = ds.n_features
    if not 1 <= nf <= n_var:
        raise InvalidArgument(f"nf must be in 1..{n_var}, got {nf}")
    rng = np.random.default_rng(seed)
    lo, hi = float(p["var_min"]), float(p["var_max"])
    n_pop = int(p["n_pop"])
    delta = 0.05 * (hi - lo)
    dmax = (hi - lo) * np.sqrt(n_var)
    mu = float(p["mu"])

    def cost(u):
        return feature_selection_cost(u, nf, ds, rng, p)

    pos = np.empty((n_pop, n_var))
    costs = np.empty(n_pop)
    sols = [None] * n_pop
    best_cost, best_sel = np.inf, None
    for i in range(n_pop):
        pos[i] = rng.uniform(lo, hi, n_var)
        costs[i], sols[i] = cost(pos[i])
        if costs[i] <= best_cost:
            best_cost, best_sel = costs[i], sols[i]
    history = []
    for it in range(int(p["max_it"])):
        new_pos = np.full((n_pop, n_var), np.nan)
        new_costs = np.full(n_pop, np.inf)
        new_sols = [None] * n_pop
        for i in range(n_pop):
            for j in range(n_pop):
                if costs[j] < costs[i]:
                    r = np.linalg.norm(pos[i] - pos[j]) / dmax
                    beta = p["psi"] * np.exp(-p["omega"] * r ** p["lam"])
                    e = delta * rng.uniform(-1.0, 1.0, n_var)
                    cand = pos[i] + beta * rng.random(n_var) * (pos[j] - pos[i]) + mu * e
                    cand = np.clip(cand, lo, hi)
                    c, s = cost(cand)
                    if c <= new_costs[i]:
                        new_pos[i], new_costs[i], new_sols[i] = cand, c, s
                        if c <= best_cost:
                            best_cost, best_sel = c, s
        # merge, sort, truncate; empty (inf) offspring fall off the end
        all_pos = np.vstack([pos, new_pos])
        all_costs = np.concatenate([costs, new_costs])
        all_sols = sols + new_sols
        order = np.argsort(all_costs, kind="stable")[:n_pop]
        pos, costs, sols = all_pos[order], all_costs[order], [all_sols[o] for o in order]
        history.append(float(best_cost))
        if callback is not None:
            callback(it, pos, costs)
        mu *= p["mu_damp"]
    return [int(i) for i in best_sel], np.array(history)
