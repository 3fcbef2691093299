import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fermkit.errors import InvalidArgument, NoFaceFound, ShapeError, UnsupportedFormat
from fermkit.features import (FeatureMatrix, extract_depth_face, facs_expression, find_nose_tip, gabor_bank,
                              gabor_features, hog_features, lbp_codes, lbp_features, lbp_histogram256,
                              lpq_features, stack_features)
from fermkit.features.lbp import N_BINS, NEIGHBORS, UNIFORM_BIN
from fermkit.features.lpq import lpq_responses

gray = arrays(np.float64, st.tuples(st.integers(3, 12), st.integers(3, 12)), elements=st.floats(0, 1))


# -- LBP -------------------------------------------------------------------

def test_lbp_length_and_constant_one_hot():
    feat = lbp_features(np.full((64, 64), 0.4), 8, 8)
    assert feat.shape == (3776,)
    cells = feat.reshape(64, N_BINS)
    expect = np.zeros(N_BINS)
    expect[UNIFORM_BIN[255]] = 1.0
    np.testing.assert_array_equal(cells, np.tile(expect, (64, 1)))


def test_uniform_table_shape():
    assert len(set(UNIFORM_BIN.tolist())) == N_BINS
    # 0 and 255 are uniform, 0b01010101 is not
    assert UNIFORM_BIN[0] != N_BINS - 1 and UNIFORM_BIN[255] != N_BINS - 1
    assert UNIFORM_BIN[0b01010101] == N_BINS - 1


@settings(max_examples=30)
@given(gray)
def test_lbp_codes_brute_force(img):
    h, w = img.shape
    codes = lbp_codes(img)
    for r in range(1, h - 1):
        for c in range(1, w - 1):
            code = sum(1 << k for k, (dr, dc) in enumerate(NEIGHBORS) if img[r + dr, c + dc] >= img[r, c])
            assert codes[r - 1, c - 1] == code


def test_lbp_local_change_stays_local():
    img = np.full((32, 32), 0.3)
    base = lbp_features(img, 16, 16).reshape(4, N_BINS)
    img[5, 5] = 0.9
    moved = lbp_features(img, 16, 16).reshape(4, N_BINS)
    assert not np.array_equal(base[0], moved[0])
    np.testing.assert_array_equal(base[1:], moved[1:])


def test_lbp_histogram256_sums_to_one():
    rng = np.random.default_rng(0)
    h = lbp_histogram256(rng.random((10, 12)))
    assert h.shape == (256,) and h.sum() == pytest.approx(1.0)


def test_lbp_validation():
    with pytest.raises(InvalidArgument):
        lbp_codes(np.zeros((2, 5)))
    with pytest.raises(InvalidArgument):
        lbp_features(np.zeros((8, 8)), 16, 16)


# -- HOG -------------------------------------------------------------------

def test_hog_length_and_constant_zero():
    feat = hog_features(np.full((64, 64), 0.5), 16, 16)
    assert feat.shape == (324,)
    assert not feat.any()


def test_hog_vertical_step_votes_horizontal_gradient():
    img = np.zeros((32, 32))
    img[:, 16:] = 1.0
    feat = hog_features(img, 16, 16).reshape(-1, 9)
    active = feat[feat.sum(axis=1) > 0]
    assert len(active)
    # 0 degrees sits halfway between the first and last 20-degree bins
    for h in active:
        assert set(np.argsort(h)[-2:]) == {0, 8}
        np.testing.assert_allclose(h[0], h[8])


@settings(max_examples=20, deadline=None)
@given(arrays(np.float64, (32, 32), elements=st.floats(0, 1)))
def test_hog_blocks_unit_or_zero(img):
    blocks = hog_features(img, 8, 8).reshape(-1, 36)
    norms = np.linalg.norm(blocks, axis=1)
    assert np.all(norms <= 1 + 1e-12)


def test_hog_too_small():
    with pytest.raises(InvalidArgument):
        hog_features(np.zeros((20, 40)), 16, 16)


# -- LPQ -------------------------------------------------------------------

def _lpq_direct(img, win):
    """STFT at the four low frequencies by explicit window sums."""
    r = (win - 1) // 2
    a = 1.0 / win
    freqs = ((0, a), (a, 0), (a, a), (a, -a))
    h, w = img.shape
    out = np.zeros((h - 2 * r, w - 2 * r, 8))
    for y in range(r, h - r):
        for x in range(r, w - r):
            for k, (fu, fv) in enumerate(freqs):
                acc = 0j
                for dy in range(-r, r + 1):
                    for dx in range(-r, r + 1):
                        acc += img[y - dy, x - dx] * np.exp(-2j * np.pi * (fu * dy + fv * dx))
                out[y - r, x - r, 2 * k] = acc.real
                out[y - r, x - r, 2 * k + 1] = acc.imag
    return out


def test_lpq_responses_match_direct_sum():
    rng = np.random.default_rng(1)
    img = rng.random((7, 8))
    np.testing.assert_allclose(lpq_responses(img, 3), _lpq_direct(img, 3), atol=1e-12)


@pytest.mark.parametrize("value", [0.0, 0.5, 1.0])
def test_lpq_constant_one_hot_at_zero(value):
    img = np.full((16, 16), value)
    hist = lpq_features(img, 3, decorr=False)
    # direct sums on a flat patch: only the DC term could be nonzero and
    # no frequency used here is DC, so every sign bit is clear
    direct = _lpq_direct(img, 3)
    assert np.max(np.abs(direct)) < 1e-12
    expect = np.zeros(256)
    expect[0] = 1.0
    np.testing.assert_array_equal(hist, expect)
    np.testing.assert_array_equal(lpq_features(img, 3), expect)


def test_lpq_histogram_sums_to_one():
    rng = np.random.default_rng(2)
    for win in (3, 5, 7):
        h = lpq_features(rng.random((32, 32)), win)
        assert h.shape == (256,) and abs(h.sum() - 1.0) <= 1e-9


def test_lpq_modes_agree():
    rng = np.random.default_rng(3)
    img = rng.random((20, 20))
    codes = lpq_features(img, 3, mode="im")
    counts = lpq_features(img, 3, mode="h")
    assert codes.shape == (18, 18) and codes.dtype == np.uint8
    np.testing.assert_array_equal(np.bincount(codes.ravel(), minlength=256), counts)
    assert not np.array_equal(lpq_features(img, 3, decorr=False, mode="im"), codes)


@pytest.mark.parametrize("fe", [2, 3])
def test_lpq_other_estimators_normalized(fe):
    rng = np.random.default_rng(4)
    assert lpq_features(rng.random((24, 24)), 5, freqestim=fe).sum() == pytest.approx(1.0, abs=1e-9)


def test_lpq_errors():
    with pytest.raises(InvalidArgument, match="Window size winSize must be odd number and greater than equal to 3"):
        lpq_features(np.zeros((8, 8)), 4)
    with pytest.raises(InvalidArgument, match="Only gray scale image"):
        lpq_features(np.zeros((8, 8, 3)))
    with pytest.raises(InvalidArgument):
        lpq_features(np.zeros((8, 8)), mode="hist")


# -- Gabor -----------------------------------------------------------------

def test_gabor_bank_layout():
    bank = gabor_bank(5, 8, 39, 39)
    assert len(bank) == 40 and bank.kernels.shape == (5, 8, 39, 39)
    assert bank.freqs[0] == 0.25 and bank.freqs[4] == pytest.approx(0.25 / 4)


def test_gabor_kernel_symmetry():
    bank = gabor_bank(2, 4, 15, 15)
    for k in bank.kernels.reshape(-1, 15, 15):
        # point reflection conjugates a centered complex carrier
        np.testing.assert_allclose(k[::-1, ::-1], np.conj(k), atol=1e-15)


def test_gabor_length_and_block_moments():
    rng = np.random.default_rng(5)
    feat = gabor_features(rng.random((128, 128)), gabor_bank(5, 8, 39, 39), 8, 8)
    assert feat.shape == (10240,)
    blocks = feat.reshape(40, 256)
    assert np.all(np.abs(blocks.mean(axis=1)) < 1e-9)
    assert np.all(np.abs(blocks.std(axis=1) - 1) < 1e-6)


def test_gabor_zero_image_gives_zeros():
    feat = gabor_features(np.zeros((32, 32)), gabor_bank(2, 2, 9, 9), 4, 4)
    assert feat.shape == (4 * 64,) and not feat.any()


def test_gabor_validation():
    with pytest.raises(InvalidArgument):
        gabor_bank(2, 2, 8, 9)
    with pytest.raises(InvalidArgument):
        gabor_features(np.zeros((30, 32)), gabor_bank(1, 1, 5, 5), 8, 8)


# -- depth face ------------------------------------------------------------

def hemisphere(size=101, radius=35, cy=50, cx=50):
    yy, xx = np.mgrid[0:size, 0:size]
    r2 = ((yy - cy) ** 2 + (xx - cx) ** 2) / radius ** 2
    depth = np.full((size, size), 0.9)
    inside = r2 < 1
    depth[inside] = 0.9 - 0.5 * np.sqrt(1 - r2[inside])
    return depth


def test_nose_tip_is_apex():
    assert find_nose_tip(hemisphere(cy=40, cx=57)) == (40, 57)


def test_nose_tip_ignores_black_spots():
    d = hemisphere()
    d[3, 3] = 0.0
    assert find_nose_tip(d) == (50, 50)


def test_extract_depth_face_crops_the_dome():
    face = extract_depth_face(hemisphere(), crop_half_width=40, side_trim=0.0)
    assert 50 <= face.shape[0] <= 81 and 50 <= face.shape[1] <= 81
    assert face.min() == 0.0  # outside the ellipse
    assert face[face.shape[0] // 2, face.shape[1] // 2] == pytest.approx(0.4, abs=0.01)


def test_side_trim_shrinks():
    full = extract_depth_face(hemisphere(), side_trim=0.0)
    trimmed = extract_depth_face(hemisphere(), side_trim=0.1)
    th, tw = int(0.1 * full.shape[0]), int(0.1 * full.shape[1])
    np.testing.assert_array_equal(trimmed, full[th:full.shape[0] - th, tw:full.shape[1] - tw])


def test_no_face_cases():
    with pytest.raises(NoFaceFound):
        extract_depth_face(np.zeros((20, 20)))
    with pytest.raises(NoFaceFound):
        extract_depth_face(np.full((20, 20), 0.5))
    with pytest.raises(InvalidArgument):
        extract_depth_face(hemisphere(), side_trim=0.5)


# -- FACS ------------------------------------------------------------------

@pytest.mark.parametrize("aus,name", [
    ([26, 25, 5, 2, 1], "Surprise"), ([6, 12], "Joy"), ([17, 15, 1], "Sadness"), ([25, 10, 9, 7, 4], "Anger"),
])
def test_facs_combinations(aus, name):
    assert facs_expression(aus) == name
    assert facs_expression(aus + aus[:1]) == name  # duplicates do not matter


@pytest.mark.parametrize("aus", [[], [6], [6, 12, 1], [1, 2, 5, 25], [0]])
def test_facs_unknown(aus):
    assert facs_expression(aus) == "Unknown"


def test_facs_invalid():
    for bad in ([-1], [1.5], [True]):
        with pytest.raises(InvalidArgument):
            facs_expression(bad)


# -- feature matrix --------------------------------------------------------

def test_stack_features_order_and_checks():
    a = FeatureMatrix(np.ones((3, 2)), [1, 2, 1], ["a0", "a1"])
    b = FeatureMatrix(np.zeros((3, 1)), None, ["b0"])
    s = stack_features([a, b])
    assert s.names == ["a0", "a1", "b0"]
    np.testing.assert_array_equal(s.values, [[1, 1, 0]] * 3)
    np.testing.assert_array_equal(s.labels, [1, 2, 1])
    with pytest.raises(ShapeError):
        stack_features([a, FeatureMatrix(np.zeros((2, 1)))])
    with pytest.raises(InvalidArgument):
        stack_features([a, a])
    with pytest.raises(InvalidArgument):
        stack_features([])


@settings(max_examples=25)
@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)),
              elements=st.floats(-1e6, 1e6, allow_nan=False)), st.booleans())
def test_feature_matrix_roundtrips(values, labelled):
    labels = np.arange(values.shape[0]) % 3 + 1 if labelled else None
    fm = FeatureMatrix(values, labels)
    back = FeatureMatrix.parse_csv(fm.to_csv())
    np.testing.assert_array_equal(back.values, fm.values)
    bb = FeatureMatrix.from_bytes(fm.to_bytes())
    np.testing.assert_array_equal(bb.values, fm.values)
    if labelled:
        np.testing.assert_array_equal(back.labels, labels)
        np.testing.assert_array_equal(bb.labels, labels)
    else:
        assert back.labels is None and bb.labels is None


def test_feature_matrix_bad_inputs():
    with pytest.raises(ShapeError):
        FeatureMatrix(np.zeros((2, 2)), [1])
    with pytest.raises(UnsupportedFormat):
        FeatureMatrix.from_bytes(b"XXXX")
    with pytest.raises(UnsupportedFormat):
        FeatureMatrix.from_bytes(FeatureMatrix(np.zeros((4, 4))).to_bytes()[:-8])
    with pytest.raises(ShapeError):
        FeatureMatrix.parse_csv("a,b\n1,2\n3\n")
