import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fermkit.errors import InvalidArgument, UnsupportedFormat
from fermkit.imgcore import (ensure_gray, from_uint8, load_image, resize, save_image, to_gray,
                             to_uint8)

unit_images = arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)),
                     elements=st.floats(0, 1, allow_nan=False))


def _write_pnm(path, magic, w, h, payload):
    path.write_bytes(magic + b"\n%d %d\n255\n" % (w, h) + bytes(payload))


def test_load_pgm_scaling(tmp_path):
    f = tmp_path / "a.pgm"
    _write_pnm(f, b"P5", 2, 2, [0, 255, 128, 64])
    img = load_image(f)
    assert img.shape == (2, 2)
    np.testing.assert_array_equal(img, np.array([[0, 1], [128 / 255, 64 / 255]]))


def test_load_ppm_equal_planes(tmp_path):
    f = tmp_path / "a.ppm"
    _write_pnm(f, b"P6", 3, 2, [77] * 18)
    img = load_image(f)
    assert img.shape == (2, 3, 3)
    assert np.all(img == 77 / 255)


def test_pgm_header_comment(tmp_path):
    f = tmp_path / "c.pgm"
    f.write_bytes(b"P5\n# made by hand\n2 1\n255\n" + bytes([10, 20]))
    np.testing.assert_array_equal(load_image(f), [[10 / 255, 20 / 255]])


def test_pgm_byte_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    f = tmp_path / "r.pgm"
    g = tmp_path / "r2.pgm"
    _write_pnm(f, b"P5", 7, 5, rng.integers(0, 256, 35).tolist())
    save_image(load_image(f), g)
    assert f.read_bytes() == g.read_bytes()


def test_png_roundtrip_rgb(tmp_path):
    rng = np.random.default_rng(0)
    img = rng.random((6, 5, 3))
    save_image(img, tmp_path / "x.png")
    back = load_image(tmp_path / "x.png")
    assert np.max(np.abs(back - img)) <= 0.5 / 255 + 1e-12


def test_save_all_ones_gives_255(tmp_path):
    save_image(np.ones((3, 4)), tmp_path / "w.pgm")
    raw = (tmp_path / "w.pgm").read_bytes()
    assert raw.endswith(bytes([255] * 12))


def test_half_rounds_up():
    assert to_uint8(np.array([0.5]))[0] == 128


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_image("/nonexistent/definitely_not_here.pgm")


def test_unknown_format(tmp_path):
    f = tmp_path / "junk.img"
    f.write_bytes(b"hello world")
    with pytest.raises(UnsupportedFormat):
        load_image(f)


def test_16bit_pgm_rejected(tmp_path):
    f = tmp_path / "deep.pgm"
    f.write_bytes(b"P5\n1 1\n65535\n\x00\x01")
    with pytest.raises(UnsupportedFormat):
        load_image(f)


@settings(max_examples=40, deadline=None)
@given(unit_images)
def test_save_load_within_quantum(tmp_path_factory, img):
    f = tmp_path_factory.mktemp("q") / "q.pgm"
    save_image(img, f)
    assert np.max(np.abs(load_image(f) - img)) <= 1 / 255


def test_to_gray_weights():
    assert to_gray(np.array([[[1.0, 0.0, 0.0]]]))[0, 0] == pytest.approx(0.2989 / 0.9999, abs=1e-12)
    assert to_gray(np.array([[[0.0, 0.0, 1.0]]]))[0, 0] == pytest.approx(0.1140 / 0.9999, abs=1e-12)
    # the unnormalized three-decimal weights are within 1e-4 of these
    assert to_gray(np.array([[[1.0, 0.0, 0.0]]]))[0, 0] == pytest.approx(0.2989, abs=1e-4)


@given(st.floats(0, 1))
def test_to_gray_equal_channels_exact(v):
    assert to_gray(np.full((2, 2, 3), v))[0, 0] == v


def test_to_gray_rejects_gray():
    with pytest.raises(InvalidArgument):
        to_gray(np.zeros((3, 3)))
    assert ensure_gray(np.zeros((3, 3))).shape == (3, 3)


def test_resize_identity_and_constant():
    rng = np.random.default_rng(1)
    img = rng.random((5, 7))
    np.testing.assert_array_equal(resize(img, 7, 5), img)
    np.testing.assert_array_equal(resize(np.full((4, 4), 0.3), 9, 2), np.full((2, 9), 0.3))


def test_resize_ramp_monotone():
    out = resize(np.array([[0.0, 1.0]]), 4, 1)[0]
    assert np.all(np.diff(out) >= 0)
    # half-pixel centers: sources at -0.25, 0.25, 0.75, 1.25 (clamped)
    np.testing.assert_allclose(out, [0.0, 0.25, 0.75, 1.0])


def test_resize_rgb_per_channel():
    rng = np.random.default_rng(2)
    img = rng.random((6, 6, 3))
    out = resize(img, 3, 4)
    assert out.shape == (4, 3, 3)
    np.testing.assert_array_equal(out[..., 1], resize(img[..., 1], 3, 4))


def test_resize_bad_dims():
    with pytest.raises(InvalidArgument):
        resize(np.zeros((3, 3)), 0, 3)


def test_from_uint8_inverse():
    q = np.arange(256, dtype=np.uint8)
    np.testing.assert_array_equal(to_uint8(from_uint8(q)), q)
