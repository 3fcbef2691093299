import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fermkit.classify import LabeledDataset
from fermkit.errors import InvalidArgument
from fermkit.metaopt import (beh_optimize, beh_segment, cluster_cost, ngn_segment, ngn_train, roulette_select,
                             vao_select, wdoa_enhance, wdoa_optimize)


def brute_cost(centers, X):
    total = 0.0
    for x in X:
        total += min(np.sqrt(sum((a - b) ** 2 for a, b in zip(x, c))) for c in centers)
    return total


@settings(max_examples=60)
@given(st.integers(1, 20), st.integers(1, 20), st.integers(1, 3), st.integers(0, 10_000))
def test_cluster_cost_matches_double_loop(n, k, d, seed):
    rng = np.random.default_rng(seed)
    X, m = rng.random((n, d)), rng.random((k, d))
    cost, ind, dmin = cluster_cost(m, X)
    assert cost == pytest.approx(brute_cost(m, X), rel=1e-12, abs=1e-12)
    assert np.all((0 <= ind) & (ind < k))
    np.testing.assert_allclose(dmin, np.linalg.norm(X - m[ind], axis=1), atol=1e-12)


def test_cluster_cost_small_cases():
    assert cluster_cost([5.0], [0.0, 10.0])[0] == 10.0
    rng = np.random.default_rng(0)
    X, m = rng.random((12, 2)), rng.random((3, 2))
    assert cluster_cost(np.vstack([m, m[:1]]), X)[0] <= cluster_cost(m, X)[0]
    # ties go to the lower index
    assert cluster_cost([1.0, 3.0], [2.0])[1][0] == 0
    with pytest.raises(InvalidArgument):
        cluster_cost(np.zeros((2, 3)), np.zeros((4, 2)))


def test_roulette_cases():
    rng = np.random.default_rng(0)
    assert all(roulette_select([1, 0, 0], rng) == 0 for _ in range(100))
    assert all(roulette_select([0, 0, 1], rng) == 2 for _ in range(100))
    draws = np.array([roulette_select([0.5, 0.5], rng) for _ in range(10_000)])
    assert 0.45 <= np.mean(draws == 0) <= 0.55
    with pytest.raises(InvalidArgument):
        roulette_select([0, 0], rng)
    with pytest.raises(InvalidArgument):
        roulette_select([-1, 2], rng)


def two_level(h=16, w=16, lo=0.2, hi=0.8):
    img = np.full((h, w), lo)
    img[:, w // 2:] = hi
    return img


# -- WDOA ------------------------------------------------------------------

@pytest.mark.parametrize("seed", range(3))
def test_wdoa_monotone_deterministic_bounded(seed):
    X = np.random.default_rng(seed).random(300)
    seen = []
    best, hist = wdoa_optimize(X, 6, 30, 10, seed, callback=lambda it, p, c: seen.append(p.copy()))
    assert np.all(np.diff(hist) <= 0)
    best2, hist2 = wdoa_optimize(X, 6, 30, 10, seed)
    np.testing.assert_array_equal(hist, hist2)
    np.testing.assert_array_equal(best, best2)
    for p in seen:
        assert p.min() >= X.min() and p.max() <= X.max()


def test_wdoa_two_level_improves_on_initial_population():
    X = two_level().ravel()
    _, hist = wdoa_optimize(X, 6, 50, 10, seed=3)
    # the initial population is the seed's first 10x6 uniform draw
    init = np.random.default_rng(3).uniform(X.min(), X.max(), (10, 6))
    assert hist[-1] <= min(cluster_cost(p, X)[0] for p in init)


def test_wdoa_enhance_outputs():
    rng = np.random.default_rng(1)
    img = np.clip(0.3 + 0.2 * rng.random((12, 12)), 0, 1)
    out, hist = wdoa_enhance(img, max_it=10)
    assert out.shape == img.shape and out.min() >= 0 and out.max() <= 1
    assert len(hist) == 10
    rgb = np.stack([img, img ** 2, np.sqrt(img)], axis=-1)
    out_rgb, _ = wdoa_enhance(rgb, max_it=5)
    assert out_rgb.shape == rgb.shape
    flat, h = wdoa_enhance(np.full((4, 4), 0.5))
    np.testing.assert_array_equal(flat, np.full((4, 4), 0.5))
    assert h.size == 0
    with pytest.raises(InvalidArgument):
        wdoa_enhance(img, k=5)


# -- BEH -------------------------------------------------------------------

def two_color(h=16, w=16):
    img = np.zeros((h, w, 3))
    img[:, : w // 2] = (0.9, 0.1, 0.1)
    img[:, w // 2:] = (0.1, 0.2, 0.9)
    return img


@pytest.mark.parametrize("seed", range(3))
def test_beh_monotone_deterministic(seed):
    rng = np.random.default_rng(seed)
    img = rng.random((8, 8, 3))
    q, labels, hist = beh_segment(img, 3, 20, 8, seed)
    assert np.all(np.diff(hist) <= 0)
    q2, labels2, hist2 = beh_segment(img, 3, 20, 8, seed)
    np.testing.assert_array_equal(hist, hist2)
    np.testing.assert_array_equal(q, q2)
    assert len(np.unique(q.reshape(-1, 3), axis=0)) <= 3
    assert set(np.unique(labels)) <= {1, 2, 3}


def test_beh_positions_stay_in_bounds():
    img = np.random.default_rng(4).random((6, 6, 3))
    X = img.reshape(-1, 3)
    seen = []
    beh_optimize(X, 4, 10, 6, 0, callback=lambda it, p, c: seen.append(p.copy()))
    for p in seen:
        assert np.all(p >= X.min(axis=0) - 1e-15) and np.all(p <= X.max(axis=0) + 1e-15)


def _single_center_cost(X):
    # best single center for a sum of distances, searched over the data points
    return min(cluster_cost(c[None, :], X)[0] for c in np.unique(X, axis=0))


def test_beh_beats_single_center():
    img = two_color()
    X = img.reshape(-1, 3)
    _, _, hist = beh_segment(img, 2, 200, 20, seed=0)
    assert hist[-1] < _single_center_cost(X)


@pytest.mark.xfail(strict=True, reason="the verbatim move pos*PYR + PeakPower*(donor - pos) pulls every "
                   "candidate toward the lower bound and the shifted scoring point sits off the colors; "
                   "measured ratios are 0.12 to 0.32 over seeds 0-4 (see notes)")
def test_beh_two_color_near_zero_cost():
    img = two_color()
    X = img.reshape(-1, 3)
    _, _, hist = beh_segment(img, 2, 200, 20, seed=0)
    assert hist[-1] < 0.05 * _single_center_cost(X)


def test_beh_rejects_k1():
    with pytest.raises(InvalidArgument):
        beh_optimize(np.zeros((4, 3)), k=1)


# -- VAO -------------------------------------------------------------------

SIGNAL = [2, 7, 11, 15, 18]


def signal_dataset(seed):
    rng = np.random.default_rng(100 + seed)
    X = rng.standard_normal((50, 20))
    y = np.where(X[:, SIGNAL].sum(axis=1) > 0, 2, 1)
    return LabeledDataset(X, y, 2)


@pytest.mark.slow
def test_vao_recovers_signal_columns():
    hits = []
    for seed in range(5):
        sel, hist = vao_select(signal_dataset(seed), 5, seed=seed)
        hits.append(len(set(sel) & set(SIGNAL)))
    assert sum(h >= 4 for h in hits) >= 3, hits


def test_vao_output_shape_and_history():
    ds = signal_dataset(0)
    params = {"max_it": 4, "epochs": 50}
    sel, hist = vao_select(ds, 5, params, seed=1)
    assert sel == sorted(set(sel)) and len(sel) == 5
    assert all(0 <= i < 20 for i in sel)
    assert np.all(np.diff(hist) <= 0) and len(hist) == 4
    sel2, hist2 = vao_select(ds, 5, params, seed=1)
    assert sel == sel2
    np.testing.assert_array_equal(hist, hist2)


def test_vao_positions_in_bounds_and_nf_check():
    ds = signal_dataset(1)
    seen = []
    vao_select(ds, 3, {"max_it": 2, "epochs": 20}, seed=0, callback=lambda it, p, c: seen.append(p.copy()))
    assert all(np.all(np.abs(p) <= 10.0) for p in seen)
    for nf in (0, 21):
        with pytest.raises(InvalidArgument):
            vao_select(ds, nf)


# -- NGN -------------------------------------------------------------------

def test_ngn_single_unit_moves_toward_mean():
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(2.0, 0.1, (40, 2)), rng.normal(3.0, 0.1, (40, 2))])
    net = ngn_train(X, {"N": 1, "max_it": 5}, seed=0)
    # replay the seed: one shuffle, then the codebook draw
    init = np.random.default_rng(0)
    init.permutation(len(X))
    w0 = init.uniform(X.min(axis=0), X.max(axis=0))
    mean = X.mean(axis=0)
    assert np.linalg.norm(net.w[0] - mean) < np.linalg.norm(w0 - mean)


def test_ngn_links_symmetric_zero_diagonal():
    rng = np.random.default_rng(1)
    X = rng.random((60, 2))

    def check(it, w, C, t):
        np.testing.assert_array_equal(C, C.T)
        np.testing.assert_array_equal(t, t.T)
        assert not np.diag(C).any()
        assert set(np.unique(C)) <= {0.0, 1.0}

    ngn_train(X, {"N": 5, "max_it": 8}, seed=2, on_epoch=check)


def test_ngn_deterministic():
    X = np.random.default_rng(3).random((50, 1))
    a = ngn_train(X, {"N": 4, "max_it": 5}, seed=7)
    b = ngn_train(X, {"N": 4, "max_it": 5}, seed=7)
    np.testing.assert_array_equal(a.w, b.w)


def test_ngn_two_level_segmentation():
    rng = np.random.default_rng(4)
    img = np.where(rng.random((24, 24)) < 0.4, 0.1, 0.9)
    labels, quant = ngn_segment(img, N=2, params={"max_it": 20})
    assert set(np.unique(labels)) == {1, 2}
    oracle = np.where(img > 0.5, 2, 1)
    assert np.mean(labels == oracle) >= 0.99


@settings(max_examples=10, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(0, 1)), st.integers(2, 5))
def test_ngn_segment_label_range(img, N):
    labels, quant = ngn_segment(img, N=N, params={"max_it": 3})
    assert set(np.unique(labels)) <= set(range(1, N + 1))
    assert len(np.unique(quant)) <= N


def test_ngn_validation():
    with pytest.raises(InvalidArgument):
        ngn_segment(np.zeros((3, 3)), N=1)
    with pytest.raises(InvalidArgument):
        ngn_train(np.zeros((0, 2)))
