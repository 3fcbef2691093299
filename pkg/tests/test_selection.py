import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermkit.errors import ConvergenceError, EmptySelection, InvalidArgument, ShapeError
from fermkit.features import FeatureMatrix
from fermkit.selection import (LassoFit, apply_selection, cd_path, fold_assignment, lambda_max, lasso_cv,
                               lasso_objective, lasso_path, pca, soft_threshold)
from fermkit.selection import _standardize


def grid_minimizer(x, y, lam, half_width=20.0, step=1e-5):
    """Brute-force argmin of the 1-D lasso objective on a uniform grid."""
    n = len(y)
    a, c, yy = x @ x / n, x @ y / n, y @ y / n
    grid = np.arange(-half_width, half_width + step / 2, step)
    obj = 0.5 * yy - c * grid + 0.5 * a * grid ** 2 + lam * np.abs(grid)
    return grid[np.argmin(obj)]


@pytest.mark.parametrize("seed", range(5))
def test_one_predictor_path_matches_grid(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(30)
    y = rng.uniform(-2, 2) * x + rng.standard_normal(30)
    coef, _, lambdas, b_std = lasso_path(x[:, None], y, n_lambda=12)
    st_ = _standardize(x[:, None], y)
    for li, lam in enumerate(lambdas):
        assert abs(b_std[0, li] - grid_minimizer(st_.xs[:, 0], st_.yc, lam)) <= 1e-4
    assert b_std[0, 0] == 0.0


def test_soft_threshold():
    np.testing.assert_array_equal(soft_threshold(np.array([-3.0, -0.5, 0.5, 3.0]), 1.0), [-2, 0, 0, 2])


def test_all_zero_at_lambda_max():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((40, 6))
    y = X[:, 0] - 2 * X[:, 3] + 0.1 * rng.standard_normal(40)
    coef, _, lambdas, b_std = lasso_path(X, y)
    assert not b_std[:, 0].any() and not coef[:, 0].any()
    # just below lambda_max something enters
    assert b_std[:, 1].any()


def test_support_contains_linear_column():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((60, 8))
    y = 3 * X[:, 5] + 0.01 * rng.standard_normal(60)
    fit = lasso_cv(X, y, k_folds=5, seed=0)
    assert 5 in fit.selected_columns()
    assert fit.min_mse_coef()[5] == pytest.approx(3.0, abs=0.05)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_kkt_conditions_hold(seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((25, 10))
    y = X @ rng.standard_normal(10) + rng.standard_normal(25)
    st_ = _standardize(X, y)
    lm = lambda_max(st_.xs, st_.yc)
    lams = np.geomspace(lm, lm * 1e-2, 8)
    b = cd_path(st_.xs, st_.yc, lams, tol=1e-10)
    n = len(y)
    for li, lam in enumerate(lams):
        grad = st_.xs.T @ (st_.yc - st_.xs @ b[:, li]) / n
        on = b[:, li] != 0
        np.testing.assert_allclose(grad[on], lam * np.sign(b[on, li]), atol=1e-6)
        assert np.all(np.abs(grad[~on]) <= lam + 1e-6)


def test_acceleration_does_not_change_solution():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((20, 40))  # p > n: singular supports happen
    y = X[:, :3].sum(axis=1) + 0.1 * rng.standard_normal(20)
    st_ = _standardize(X, y)
    lm = lambda_max(st_.xs, st_.yc)
    lams = np.geomspace(lm, lm * 1e-3, 30)
    fast = cd_path(st_.xs, st_.yc, lams, tol=1e-9)
    slow = cd_path(st_.xs, st_.yc, lams, tol=1e-9, accelerate=False)
    for li, lam in enumerate(lams):
        f_obj = lasso_objective(st_.xs, st_.yc, fast[:, li], lam)
        s_obj = lasso_objective(st_.xs, st_.yc, slow[:, li], lam)
        assert f_obj <= s_obj + 1e-7


def test_trace_objective_non_increasing_within_lambda():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((30, 5))
    y = X @ np.array([1.0, 0, -1, 0, 0.5]) + 0.2 * rng.standard_normal(30)
    seen = {}
    lasso_path(X, y, n_lambda=10, trace=lambda li, obj: seen.setdefault(li, []).append(obj))
    for vals in seen.values():
        assert np.all(np.diff(vals) <= 1e-12)


def test_convergence_budget():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((30, 5))
    X[:, 1] = X[:, 0] + 1e-3 * rng.standard_normal(30)
    y = X[:, 0] + X[:, 1]
    with pytest.raises(ConvergenceError):
        lasso_path(X, y, max_sweeps=1, tol=1e-14)


def test_constant_column_excluded():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((20, 3))
    X[:, 1] = 4.0
    y = X[:, 0]
    coef, _, _, _ = lasso_path(X, y)
    assert not coef[1].any()


def test_fold_assignment_balanced_and_seeded():
    f = fold_assignment(23, 5, 7)
    assert sorted(np.bincount(f).tolist()) == [4, 4, 5, 5, 5]
    np.testing.assert_array_equal(f, fold_assignment(23, 5, 7))


def test_lasso_cv_validation():
    X = np.zeros((10, 2))
    with pytest.raises(InvalidArgument):
        lasso_cv(np.random.default_rng(0).random((10, 2)), np.ones(10))
    with pytest.raises(InvalidArgument):
        lasso_cv(X, np.arange(10.0), k_folds=1)
    with pytest.raises(ShapeError):
        lasso_cv(X, np.arange(9.0))


def _fit_with(selected, p=4):
    coef = np.zeros((p, 2))
    coef[selected, 1] = 1.0
    z = np.zeros(2)
    return LassoFit(coef, z, np.array([1.0, 0.5]), coef, z, z, 1)


def test_apply_selection_cases():
    fm = FeatureMatrix(np.arange(12.0).reshape(3, 4), [1, 2, 1], ["a", "b", "c", "d"])
    out = apply_selection(fm, _fit_with([1, 3]))
    assert out.names == ["b", "d"]
    np.testing.assert_array_equal(out.values, fm.values[:, [1, 3]])
    np.testing.assert_array_equal(out.labels, fm.labels)
    with pytest.raises(EmptySelection):
        apply_selection(fm, _fit_with([]))
    with pytest.raises(ShapeError):
        apply_selection(fm, _fit_with([0], p=5))


def test_lasso_fit_json_roundtrip():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((30, 4))
    fit = lasso_cv(X, X[:, 2] + 0.1 * rng.standard_normal(30), k_folds=3)
    back = LassoFit.from_json(fit.to_json())
    np.testing.assert_array_equal(back.coef, fit.coef)
    assert back.selected_columns() == fit.selected_columns()
    np.testing.assert_array_equal(back.predict(X), fit.predict(X))


def test_pca_line():
    t = np.linspace(-1, 1, 11)
    X = np.column_stack([t, t])
    r = pca(X)
    np.testing.assert_allclose(r.coeff[:, 0], [np.sqrt(0.5)] * 2, atol=1e-12)
    np.testing.assert_allclose(r.latent[1], 0.0, atol=1e-12)
    np.testing.assert_allclose(r.scores[:, 0], t * np.sqrt(2), atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.integers(3, 8), st.integers(1, 5))
def test_pca_reconstruction_and_trace(seed, n, p):
    X = np.random.default_rng(seed).standard_normal((n, p))
    r = pca(X)
    np.testing.assert_allclose(r.scores @ r.coeff.T + r.mean, X, atol=1e-10)
    np.testing.assert_allclose(r.latent.sum(), np.var(X, axis=0, ddof=1).sum(), rtol=1e-10)
    assert np.all(np.diff(r.latent) <= 1e-12)
