"""Shared pieces of the population optimizers."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument


def cluster_cost(centers, X):
    """Sum of each point's distance to its nearest center (not squared).

    Returns (cost, assignments, min_dists); assignments are 0-based and
    ties go to the lower center index.
    """
    m = np.asarray(centers, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if m.ndim == 1:
        m = m[:, None]
    if X.ndim == 1:
        X = X[:, None]
    if m.shape[1] != X.shape[1]:
        raise InvalidArgument(f"center dim {m.shape[1]} != data dim {X.shape[1]}")
    if m.shape[1] == 1:
        d = np.abs(X - m[:, 0][None, :])
    else:
        d = np.sqrt(((X[:, None, :] - m[None, :, :]) ** 2).sum(-1))
    ind = np.argmin(d, axis=1)
    dmin = d[np.arange(d.shape[0]), ind]
    return float(dmin.sum()), ind, dmin


def roulette_select(P, rng) -> int:
    """First index whose cumulative (normalized) weight reaches a uniform draw."""
    P = np.asarray(P, dtype=np.float64)
    if np.any(P < 0):
        raise InvalidArgument("roulette weights must be non-negative")
    total = P.sum()
    if not total > 0:
        raise InvalidArgument("roulette weights sum to zero")
    c = np.cumsum(P / total)
    r = rng.random()
    j = int(np.searchsorted(c, r, side="left"))
    if j >= len(P):  # r above a cumsum that rounded below 1
        j = int(np.nonzero(P)[0][-1])
    return j


def n_keep(rate, n_pop) -> int:
    # MATLAB round: halves away from zero
    return int(np.floor(rate * n_pop + 0.5))


def sort_population(pos, cost, *extra):
    order = np.argsort(cost, kind="stable")
    return (pos[order], cost[order]) + tuple(e[order] for e in extra)
