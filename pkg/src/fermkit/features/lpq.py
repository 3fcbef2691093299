"""Local phase quantization (blur-insensitive STFT phase codes)."""

from __future__ import annotations

import numpy as np
from scipy.signal import convolve2d

from ..errors import InvalidArgument

RHO = 0.90
# almost-unit diagonal that separates otherwise repeated singular values
A_DIAG = (1.000007, 1.000006, 1.000005, 1.000004, 1.000003, 1.000002, 1.000001, 1.0)
MODES = ("nh", "h", "im")


def _maxnorm(w):
    m = w.flat[np.argmax(np.abs(w))] if np.iscomplexobj(w) else np.max(w)
    return w / max(abs(np.real(m)), abs(np.imag(m)))


def lpq_filters(win_size: int, freqestim: int = 1):
    """1-D filters (w0, w1, w2) for the four low-frequency points."""
    r = (win_size - 1) // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    alpha = 1.0 / win_size
    if freqestim in (1, 2):
        w0 = np.ones_like(x)
        w1 = np.exp(-2j * np.pi * x * alpha)
        w2 = np.conj(w1)
        if freqestim == 2:
            sigma_s = (win_size - 1) / 4.0
            gs = np.exp(-0.5 * (x / sigma_s) ** 2) / (np.sqrt(2 * np.pi) * sigma_s)
            w0, w1, w2 = gs * w0, gs * w1, gs * w2
            w1 = w1 - w1.mean()
            w2 = w2 - w2.mean()
    elif freqestim == 3:
        sigma_a = 8.0 / (win_size - 1)
        u = np.arange(1, r + 1, dtype=np.float64)
        g0 = np.exp(-(x ** 2) * (np.sqrt(2) * sigma_a) ** 2)
        g1 = np.concatenate([np.zeros(r + 1), u * np.exp(-(u ** 2) * sigma_a ** 2)])
        g0 = g0 / np.max(np.abs(g0))
        g1 = g1 / np.max(np.abs(g1))
        w0 = np.real(np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(g0))))
        w1 = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(g1)))
        w2 = np.conj(w1)
        w0, w1, w2 = _maxnorm(w0), _maxnorm(w1), _maxnorm(w2)
    else:
        raise InvalidArgument("freqestim must be 1, 2 or 3")
    return w0, w1, w2


def _sep(img, col, row):
    # column filter first, then row filter, both 'valid'
    return convolve2d(convolve2d(img, col[:, None], mode="valid"), row[None, :], mode="valid")


def lpq_responses(img, win_size=3, freqestim=1) -> np.ndarray:
    """Eight real planes (H-w+1, W-w+1, 8): Re/Im at the four frequencies."""
    w0, w1, w2 = lpq_filters(win_size, freqestim)
    pairs = ((w0, w1), (w1, w0), (w1, w1), (w1, w2))
    planes = []
    for col, row in pairs:
        resp = _sep(img, col, row)
        planes += [np.real(resp), np.imag(resp)]
    return np.stack(planes, axis=-1)


def whitening_matrix(win_size=3, freqestim=1, rho=RHO) -> np.ndarray:
    """V from the SVD of A D A with D = M C M^T.

    Column signs are fixed so that each column's largest-magnitude entry
    is positive, making the transform independent of the LAPACK build.
    """
    w0, w1, w2 = lpq_filters(win_size, freqestim)
    xp, yp = np.meshgrid(np.arange(1, win_size + 1), np.arange(1, win_size + 1))
    pp = np.column_stack([xp.ravel(order="F"), yp.ravel(order="F")]).astype(np.float64)
    dd = np.sqrt(((pp[:, None, :] - pp[None, :, :]) ** 2).sum(-1))
    cov = rho ** dd
    rows = []
    for a, b in ((w0, w1), (w1, w0), (w1, w1), (w1, w2)):
        q = np.outer(a, b)
        rows += [np.real(q).ravel(order="F"), np.imag(q).ravel(order="F")]
    m = np.array(rows)
    d = m @ cov @ m.T
    a = np.diag(A_DIAG)
    _, _, vt = np.linalg.svd(a @ d @ a)
    v = vt.T
    idx = np.argmax(np.abs(v), axis=0)
    v = v * np.sign(v[idx, np.arange(v.shape[1])])
    return v


def lpq_features(img, win_size=3, decorr=True, mode="nh", freqestim=1):
    """LPQ histogram ('nh' normalized, 'h' counts) or code image ('im')."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise InvalidArgument("Only gray scale image can be used as input")
    if win_size < 3 or win_size % 2 != 1:
        raise InvalidArgument("Window size winSize must be odd number and greater than equal to 3")
    if mode not in MODES:
        raise InvalidArgument("mode must be nh, h, or im")
    if min(img.shape) < win_size:
        raise InvalidArgument("image is smaller than the LPQ window")
    resp = lpq_responses(img, win_size, freqestim)
    rows, cols, nplanes = resp.shape
    if decorr:
        v = whitening_matrix(win_size, freqestim)
        resp = (resp.reshape(-1, nplanes) @ v).reshape(rows, cols, nplanes)
    # round-off on flat regions must not read as a positive sign
    tol = 1e-10 * max(float(np.max(np.abs(img))), 1.0) * win_size * win_size
    codes = np.zeros((rows, cols), dtype=np.int64)
    for i in range(nplanes):
        codes += (resp[:, :, i] > tol).astype(np.int64) << i
    if mode == "im":
        return codes.astype(np.uint8)
    hist = np.bincount(codes.ravel(), minlength=256).astype(np.float64)
    if mode == "nh":
        hist /= hist.sum()
    return hist
