"""Lasso with k-fold cross-validation, column selection, and PCA."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, EmptySelection, InvalidArgument, ShapeError
from .features.matrix import FeatureMatrix

N_LAMBDA = 100
LAMBDA_RATIO = 1e-4
TOL = 1e-7
MAX_SWEEPS = 100_000
ACCEL_EVERY = 3


def soft_threshold(rho, lam):
    return np.sign(rho) * np.maximum(np.abs(rho) - lam, 0.0)


def _as_array(X):
    if isinstance(X, FeatureMatrix):
        return X.values
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError("X must be 2-D")
    return X


@dataclass
class _Standardized:
    xs: np.ndarray
    mean: np.ndarray
    sd: np.ndarray  # 0 marks excluded columns
    y_mean: float
    yc: np.ndarray


def _standardize(X, y) -> _Standardized:
    mean = X.mean(axis=0)
    sd = X.std(axis=0)
    keep = sd > 1e-12 * np.maximum(np.abs(mean), 1.0)
    sd = np.where(keep, sd, 0.0)
    xs = np.where(keep, (X - mean) / np.where(keep, sd, 1.0), 0.0)
    y_mean = float(y.mean())
    return _Standardized(xs, mean, sd, y_mean, y - y_mean)


def lambda_max(xs, yc) -> float:
    return float(np.max(np.abs(xs.T @ yc)) / xs.shape[0])


def lambda_sequence(lam_max, n_lambda=N_LAMBDA, ratio=LAMBDA_RATIO) -> np.ndarray:
    return np.geomspace(lam_max, lam_max * ratio, n_lambda)


def lasso_objective(xs, yc, beta, lam) -> float:
    r = yc - xs @ beta
    return float(r @ r / (2 * len(yc)) + lam * np.abs(beta).sum())


def _objective_q(c, beta, q, lam):
    # objective minus the constant yy/2
    return -c @ beta + 0.5 * beta @ q + lam * np.abs(beta).sum()


def _restricted_minimizer(g, rhs, n):
    if rhs.size < n:
        try:
            return np.linalg.solve(g, rhs)
        except np.linalg.LinAlgError:
            pass
    return np.linalg.lstsq(g, rhs, rcond=None)[0]


def _support_jump(g, c, beta, q, lam, n):
    """Feature-sign steps toward the closed-form minimizer on the support.

    On a fixed support and sign pattern the objective is a quadratic with
    minimizer b.  Moving from beta toward b stays in the orthant up to the
    first sign change; that coordinate is dropped and the solve repeated.
    When the support Gram block is singular and the quadratic is unbounded
    below, the walk follows the null-space descent direction instead.
    Every step lowers the objective.  The result is kept only if the
    objective did not rise; otherwise ``beta`` is untouched.  Returns the
    (possibly updated) q.
    """
    trial = beta.copy()
    for _ in range(np.count_nonzero(beta)):
        sup = np.nonzero(trial)[0]
        if sup.size == 0:
            break
        cur = trial[sup]
        s = np.sign(cur)
        g_s = g[np.ix_(sup, sup)]
        rhs = c[sup] - lam * s
        b = _restricted_minimizer(g_s, rhs, n)
        resid = rhs - g_s @ b
        if np.linalg.norm(resid) > 1e-9 * max(np.linalg.norm(rhs), 1.0):
            # singular support: the quadratic falls without bound along the
            # null-space direction ``resid``, so walk it to the first zero
            step = resid
            hits = np.sign(step) == -s
            if not hits.any():
                break
            ratio = np.full(sup.size, np.inf)
            ratio[hits] = -cur[hits] / step[hits]
        else:
            flips = np.sign(b) != s
            if not flips.any():
                trial[sup] = b
                break
            step = b - cur
            ratio = np.full(sup.size, np.inf)
            ratio[flips] = cur[flips] / (cur[flips] - b[flips])
        k = int(np.argmin(ratio))
        trial[sup] = cur + ratio[k] * step
        trial[sup[k]] = 0.0
        # numerical guard: nothing may end up on the wrong side
        trial[sup[np.sign(trial[sup]) == -s]] = 0.0
    q_trial = trial @ g
    if _objective_q(c, trial, q_trial, lam) > _objective_q(c, beta, q, lam):
        return q
    beta[:] = trial
    return q_trial


def _sweeps(g, c, beta, q, lam, tol, budget, n, accelerate, on_sweep):
    """Cyclic sweeps over a (small) coordinate block until max change < tol.

    ``g``, ``c``, ``beta``, ``q`` are restricted to the block and updated in
    place except ``q``, which is returned.  Returns (q, sweeps used).
    """
    diag = np.diag(g).copy()
    m = len(beta)
    used = 0
    max_delta = np.inf
    while max_delta >= tol:
        if used >= budget:
            raise ConvergenceError(f"lasso did not converge at lambda={lam:.3g}")
        used += 1
        max_delta = 0.0
        for j in range(m):
            old = beta[j]
            rho = c[j] - q[j] + diag[j] * old
            mag = abs(rho) - lam
            new = (mag if rho > 0 else -mag) / diag[j] if mag > 0 else 0.0
            if new != old:
                delta = new - old
                beta[j] = new
                q += g[j] * delta  # g is symmetric; rows are contiguous
                max_delta = max(max_delta, abs(delta))
        if accelerate and used % ACCEL_EVERY == 0 and max_delta >= tol:
            q = _support_jump(g, c, beta, q, lam, n)
        if on_sweep is not None:
            on_sweep(-c @ beta + 0.5 * beta @ q + lam * np.abs(beta).sum())
    return q, used


def cd_path(xs, yc, lambdas, tol=TOL, max_sweeps=MAX_SWEEPS, trace=None, accelerate=True) -> np.ndarray:
    """Warm-started cyclic coordinate descent on standardized data.

    Returns coefficients (p x n_lambda).  Sweeps run over the active set
    until the largest change falls below ``tol``; a vectorized KKT check
    of the inactive coordinates then either confirms convergence or
    admits the violators.  With ``accelerate``, every few sweeps a
    closed-form solve on the current support is tried; it is accepted
    only when it lowers the objective, and convergence is still decided
    by a plain sweep.  ``trace(lam_index, objective)`` is called after
    every sweep when given.
    """
    n, p = xs.shape
    gram = xs.T @ xs / n
    c = xs.T @ yc / n
    half_yy = 0.5 * float(yc @ yc) / n
    usable = np.diag(gram) > 0
    beta = np.zeros(p)
    q = np.zeros(p)  # gram @ beta
    out = np.zeros((p, len(lambdas)))
    active = np.zeros(0, dtype=np.intp)
    for li, lam in enumerate(lambdas):
        on_sweep = None if trace is None else (lambda obj, li=li: trace(li, half_yy + obj))
        budget = max_sweeps
        while True:
            if active.size:
                g_a = gram[np.ix_(active, active)]
                b_a = beta[active].copy()
                q_a, used = _sweeps(g_a, c[active], b_a, q[active].copy(), lam, tol, budget, n,
                                    accelerate, on_sweep)
                budget -= used
                beta[active] = b_a
                q = b_a @ gram[active]
            # an inactive coordinate would move iff |c_j - q_j| > lam
            viol = np.nonzero(usable & (beta == 0) & (np.abs(c - q) > lam))[0]
            if viol.size == 0:
                break
            active = np.union1d(active, viol)
        active = active[beta[active] != 0]
        out[:, li] = beta
    return out


def _to_original(st: _Standardized, b_std):
    scale = np.where(st.sd > 0, 1.0 / np.where(st.sd > 0, st.sd, 1.0), 0.0)
    coef = b_std * scale[:, None]
    intercept = st.y_mean - st.mean @ coef
    return coef, intercept


@dataclass
class LassoFit:
    coef: np.ndarray  # original scale, features x n_lambda
    intercept: np.ndarray
    lambdas: np.ndarray  # descending, standardized-scale penalty
    coef_std: np.ndarray
    cv_mse: np.ndarray
    cv_se: np.ndarray
    index_min_mse: int

    @property
    def n_features(self) -> int:
        return self.coef.shape[0]

    def min_mse_coef(self) -> np.ndarray:
        return self.coef[:, self.index_min_mse]

    def selected_columns(self) -> list[int]:
        return [int(i) for i in np.nonzero(self.min_mse_coef() != 0)[0]]

    def predict(self, X, index=None) -> np.ndarray:
        idx = self.index_min_mse if index is None else index
        return _as_array(X) @ self.coef[:, idx] + self.intercept[idx]

    def to_json(self) -> str:
        doc = {
            "schema": 1,
            "lambdas": self.lambdas.tolist(),
            "cv_mse": self.cv_mse.tolist(),
            "cv_se": self.cv_se.tolist(),
            "index_min_mse": self.index_min_mse,
            "selected": self.selected_columns(),
            "intercept": self.intercept.tolist(),
            "coef": self.coef.tolist(),
            "coef_std": self.coef_std.tolist(),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "LassoFit":
        d = json.loads(text)
        arr = lambda k: np.asarray(d[k], dtype=np.float64)  # noqa: E731
        return cls(arr("coef"), arr("intercept"), arr("lambdas"), arr("coef_std"),
                   arr("cv_mse"), arr("cv_se"), int(d["index_min_mse"]))


def fold_assignment(n, k, seed) -> np.ndarray:
    """Fold id per row: shuffled by ``seed`` then dealt round-robin."""
    perm = np.random.default_rng(seed).permutation(n)
    folds = np.empty(n, dtype=np.intp)
    folds[perm] = np.arange(n) % k
    return folds


def lasso_path(X, y, lambdas=None, n_lambda=N_LAMBDA, tol=TOL, max_sweeps=MAX_SWEEPS, trace=None):
    """Coefficients along the path; returns (coef, intercept, lambdas, coef_std)."""
    X = _as_array(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    st = _standardize(X, y)
    if lambdas is None:
        lam_max = lambda_max(st.xs, st.yc)
        if lam_max <= 0:
            raise InvalidArgument("response carries no signal (zero lambda_max)")
        lambdas = lambda_sequence(lam_max, n_lambda)
    b_std = cd_path(st.xs, st.yc, lambdas, tol, max_sweeps, trace)
    coef, intercept = _to_original(st, b_std)
    return coef, intercept, np.asarray(lambdas), b_std


def lasso_cv(X, y, k_folds=5, seed=0, n_lambda=N_LAMBDA, tol=TOL, max_sweeps=MAX_SWEEPS) -> LassoFit:
    X = _as_array(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    n = X.shape[0]
    if len(y) != n:
        raise ShapeError("X rows and y length differ")
    if not 2 <= k_folds <= n:
        raise InvalidArgument(f"need 2 <= k_folds <= n, got k={k_folds}, n={n}")
    if np.ptp(y) == 0:
        raise InvalidArgument("response is constant")
    coef, intercept, lambdas, b_std = lasso_path(X, y, None, n_lambda, tol, max_sweeps)
    folds = fold_assignment(n, k_folds, seed)
    fold_mse = np.zeros((k_folds, len(lambdas)))
    for f in range(k_folds):
        tr, te = folds != f, folds == f
        st = _standardize(X[tr], y[tr])
        c_f, i_f = _to_original(st, cd_path(st.xs, st.yc, lambdas, tol, max_sweeps))
        pred = X[te] @ c_f + i_f
        fold_mse[f] = np.mean((pred - y[te, None]) ** 2, axis=0)
    cv_mse = fold_mse.mean(axis=0)
    cv_se = fold_mse.std(axis=0, ddof=1) / np.sqrt(k_folds)
    return LassoFit(coef, intercept, lambdas, b_std, cv_mse, cv_se, int(np.argmin(cv_mse)))


def apply_selection(features, fit: LassoFit) -> FeatureMatrix:
    """Keep the columns whose min-MSE coefficient is nonzero."""
    fm = features if isinstance(features, FeatureMatrix) else FeatureMatrix(features)
    if fm.n_cols != fit.n_features:
        raise ShapeError(f"fit covers {fit.n_features} columns, matrix has {fm.n_cols}")
    cols = fit.selected_columns()
    if not cols:
        raise EmptySelection("min-MSE lasso model has no nonzero coefficients")
    return fm.take_columns(cols)


@dataclass(frozen=True)
class PcaResult:
    coeff: np.ndarray
    scores: np.ndarray
    latent: np.ndarray
    mean: np.ndarray


def pca(X) -> PcaResult:
    X = _as_array(X)
    n = X.shape[0]
    if n < 2:
        raise InvalidArgument("PCA needs at least 2 rows")
    mean = X.mean(axis=0)
    xc = X - mean
    u, s, vt = np.linalg.svd(xc, full_matrices=False)
    k = min(n - 1, X.shape[1])
    u, s, v = u[:, :k], s[:k], vt[:k].T
    idx = np.argmax(np.abs(v), axis=0)
    sgn = np.sign(v[idx, np.arange(k)])
    sgn[sgn == 0] = 1.0
    v = v * sgn
    u = u * sgn
    return PcaResult(v, u * s, s * s / (n - 1), mean)
