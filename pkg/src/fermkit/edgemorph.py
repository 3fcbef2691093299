"""Edge detection and gray/binary morphology."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .enhance import derivatives, gaussian_blur
from .errors import InvalidArgument
from .imgcore import as_gray

EDGE_METHODS = ("sobel", "prewitt", "roberts", "log", "zerocross", "canny", "approxcanny")

LAPLACIAN_3X3 = np.array([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]])
ROBERTS_A = np.array([[1.0, 0.0], [0.0, -1.0]])
ROBERTS_B = np.array([[0.0, 1.0], [-1.0, 0.0]])

CANNY_SIGMA = np.sqrt(2.0)
CANNY_HIGH_PERCENTILE = 70.0
CANNY_LOW_RATIO = 0.4
AUTO_THRESHOLD_SCALE = 4.0


@dataclass(frozen=True)
class Strel:
    """Flat structuring element given as (dx, dy) offsets."""

    offsets: tuple
    shape: str = "custom"
    radius: int | None = None

    def __post_init__(self):
        if not self.offsets:
            raise InvalidArgument("structuring element needs at least one offset")
        if (0, 0) not in self.offsets:
            raise InvalidArgument("structuring element must contain the origin")

    @classmethod
    def disk(cls, radius: int) -> "Strel":
        if radius < 0:
            raise InvalidArgument("disk radius must be >= 0")
        r = int(radius)
        offs = tuple((dx, dy) for dy in range(-r, r + 1) for dx in range(-r, r + 1) if dx * dx + dy * dy <= r * r)
        return cls(offs, "disk", r)

    def reflect(self) -> "Strel":
        return Strel(tuple((-dx, -dy) for dx, dy in self.offsets), self.shape, self.radius)


def _gradient_edges(img, method):
    if method == "roberts":
        ga = ndimage.correlate(img, ROBERTS_A, mode="nearest", origin=(-1, -1))
        gb = ndimage.correlate(img, ROBERTS_B, mode="nearest", origin=(-1, -1))
        return np.hypot(ga, gb)
    return np.hypot(*derivatives(img, method))


def log_kernel(sigma: float) -> np.ndarray:
    half = int(np.ceil(3.0 * sigma))
    y, x = np.mgrid[-half:half + 1, -half:half + 1].astype(np.float64)
    r2 = x * x + y * y
    g = np.exp(-r2 / (2.0 * sigma * sigma))
    g /= g.sum()
    k = g * (r2 - 2.0 * sigma * sigma) / sigma ** 4
    # zero-sum so flat regions give exactly no response
    return k - k.mean()


def _zero_crossings(resp, threshold):
    """Mark pixels where the response changes sign towards the right or
    bottom neighbor with a jump larger than ``threshold``."""
    edges = np.zeros(resp.shape, dtype=bool)
    a, b = resp[:, :-1], resp[:, 1:]
    hit = (np.sign(a) * np.sign(b) < 0) & (np.abs(a - b) > threshold)
    edges[:, :-1] |= hit
    a, b = resp[:-1, :], resp[1:, :]
    hit = (np.sign(a) * np.sign(b) < 0) & (np.abs(a - b) > threshold)
    edges[:-1, :] |= hit
    return edges


def _non_max_suppression(mag, gx, gy):
    """Keep ridge pixels along the gradient direction.

    The comparison is >= against the backward neighbor and > against the
    forward neighbor so that a two-pixel plateau keeps exactly one pixel.
    """
    h, w = mag.shape
    angle = np.mod(np.degrees(np.arctan2(gy, gx)), 180.0)
    sector = (np.floor((angle + 22.5) / 45.0).astype(int)) % 4
    # (drow, dcol) of the forward neighbor for 0, 45, 90, 135 degrees
    steps = [(0, 1), (1, 1), (1, 0), (1, -1)]
    padded = np.pad(mag, 1, mode="constant")
    keep = np.zeros_like(mag, dtype=bool)
    rows, cols = np.mgrid[0:h, 0:w]
    for s, (dr, dc) in enumerate(steps):
        sel = sector == s
        r, c = rows[sel] + 1, cols[sel] + 1
        fwd = padded[r + dr, c + dc]
        bwd = padded[r - dr, c - dc]
        m = mag[sel]
        keep[sel] = (m >= bwd) & (m > fwd) & (m > 0)
    return keep


def _canny(img, sigma, hysteresis, high=None, low=None):
    smooth = gaussian_blur(img, sigma)
    gx, gy = derivatives(smooth, "sobel")
    mag = np.hypot(gx, gy)
    nz = mag[mag > 0]
    if nz.size == 0:
        return np.zeros(img.shape, dtype=bool)
    if high is None:
        high = np.percentile(nz, CANNY_HIGH_PERCENTILE)
    if low is None:
        low = CANNY_LOW_RATIO * high
    thin = _non_max_suppression(mag, gx, gy)
    strong = thin & (mag >= high)
    if not hysteresis:
        return strong
    weak = thin & (mag >= low)
    labels, _ = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    keep = np.unique(labels[strong])
    keep = keep[keep > 0]
    return np.isin(labels, keep) & weak


def detect_edges(img, method="sobel", **params) -> np.ndarray:
    """Binary edge map.

    ``params`` may contain ``threshold`` (gradient and Laplacian methods),
    ``sigma`` (log, canny), ``kernel`` (zerocross) and ``high``/``low``
    (canny).  Unspecified thresholds follow the automatic rules: four
    times the mean gradient magnitude; 0.75 times the mean absolute
    Laplacian response; the 70th percentile of nonzero smoothed gradient
    magnitudes with low = 0.4 high for canny.
    """
    img = as_gray(img)
    if method not in EDGE_METHODS:
        raise InvalidArgument(f"unknown edge method {method!r}")
    if method in ("sobel", "prewitt", "roberts"):
        mag = _gradient_edges(img, method)
        thr = params.get("threshold")
        if thr is None:
            thr = AUTO_THRESHOLD_SCALE * mag.mean()
        return mag > thr
    if method in ("log", "zerocross"):
        if method == "log":
            kernel = log_kernel(params.get("sigma", 2.0))
        else:
            kernel = np.asarray(params.get("kernel", LAPLACIAN_3X3), dtype=np.float64)
        resp = ndimage.correlate(img, kernel, mode="nearest")
        thr = params.get("threshold")
        if thr is None:
            thr = 0.75 * np.abs(resp).mean()
        return _zero_crossings(resp, thr)
    sigma = params.get("sigma", CANNY_SIGMA)
    return _canny(img, sigma, method == "canny", params.get("high"), params.get("low"))


def binarize(img, threshold=0.5) -> np.ndarray:
    img = as_gray(img)
    if not 0.0 <= threshold <= 1.0:
        raise InvalidArgument("threshold must lie in [0, 1]")
    return img > threshold


def _shift_reduce(img, offsets, pad_value, reduce, sign):
    r = max(max(abs(dx), abs(dy)) for dx, dy in offsets)
    padded = np.pad(img, r, mode="constant", constant_values=pad_value)
    h, w = img.shape
    out = None
    for dx, dy in offsets:
        sx, sy = sign * dx, sign * dy
        view = padded[r + sy:r + sy + h, r + sx:r + sx + w]
        out = view.copy() if out is None else reduce(out, view)
    return out


def dilate(img, se: Strel) -> np.ndarray:
    """out(p) = max over offsets o of img(p - o); outside pixels count as 0."""
    return _shift_reduce(img, se.offsets, 0.0, np.maximum, -1)


def erode(img, se: Strel) -> np.ndarray:
    """out(p) = min over offsets o of img(p + o); outside pixels count as 1."""
    return _shift_reduce(img, se.offsets, 1.0, np.minimum, 1)


MORPH_OPS = ("dilate", "erode", "open", "close", "tophat", "bothat")


def morph(img, op, se: Strel) -> np.ndarray:
    """Flat gray morphology; boolean input gives boolean output."""
    binary = np.asarray(img).dtype == bool
    src = np.asarray(img, dtype=np.float64)
    if src.ndim != 2:
        raise InvalidArgument("morphology expects a 2-D image")
    if op == "dilate":
        out = dilate(src, se)
    elif op == "erode":
        out = erode(src, se)
    elif op == "open":
        out = dilate(erode(src, se), se)
    elif op == "close":
        out = erode(dilate(src, se), se)
    elif op == "tophat":
        out = src - dilate(erode(src, se), se)
    elif op == "bothat":
        out = erode(dilate(src, se), se) - src
    else:
        raise InvalidArgument(f"unknown morphology op {op!r}")
    return out > 0.5 if binary else out


_FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


def fill_holes(img) -> np.ndarray:
    """Set background regions (4-connected) that do not touch the border."""
    fg = np.asarray(img, dtype=bool)
    labels, n = ndimage.label(~fg, structure=_FOUR_CONNECTED)
    if n == 0:
        return fg.copy()
    border = np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]]))
    holes = ~np.isin(labels, border) & (labels > 0)
    return fg | holes
