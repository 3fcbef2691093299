"""Spatial-domain preprocessing: contrast, histograms, filters, noise, repair.

Every function takes and returns [0, 1] float images.  Padding differs
per filter and is stated in each docstring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

from .errors import InvalidArgument
from .imgcore import as_gray

N_LEVELS = 256

SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
PREWITT_X = np.array([[-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0]])


def _levels(img) -> np.ndarray:
    return np.clip(np.floor(np.asarray(img) * 255.0 + 0.5), 0, 255).astype(np.intp)


def histogram(img) -> np.ndarray:
    """256-bin intensity histogram (bin k holds pixels rounding to k/255)."""
    img = as_gray(img)
    return np.bincount(_levels(img).ravel(), minlength=N_LEVELS)


def adjust_contrast(img, low_pct=0.01, high_pct=0.99) -> np.ndarray:
    """Stretch the [low_pct, high_pct] percentile range linearly onto [0, 1].

    A flat image (equal percentiles) is returned unchanged.
    """
    img = as_gray(img)
    if not 0.0 <= low_pct < high_pct <= 1.0:
        raise InvalidArgument("need 0 <= low_pct < high_pct <= 1")
    lo, hi = np.percentile(img, [100.0 * low_pct, 100.0 * high_pct])
    if hi <= lo:
        return img.copy()
    return np.clip((img - lo) / (hi - lo), 0.0, 1.0)


def adjust_window(img, low, high) -> np.ndarray:
    """Map an explicit input window [low, high] onto [0, 1]."""
    img = np.asarray(img, dtype=np.float64)
    if high <= low:
        return img.copy()
    return np.clip((img - low) / (high - low), 0.0, 1.0)


def equalize_hist(img) -> np.ndarray:
    """CDF histogram equalization over 256 levels."""
    img = as_gray(img)
    levels = _levels(img)
    counts = np.bincount(levels.ravel(), minlength=N_LEVELS)
    cdf = np.cumsum(counts) / levels.size
    cdf_min = cdf[np.flatnonzero(counts)[0]]
    if cdf_min >= 1.0:
        return img.copy()
    mapped = (cdf - cdf_min) / (1.0 - cdf_min)
    lut = np.floor(np.clip(mapped, 0.0, 1.0) * 255.0 + 0.5) / 255.0
    return lut[levels]


def _windows(img, kw, kh, mode, **pad_kw):
    top, left = (kh - 1) // 2, (kw - 1) // 2
    padded = np.pad(img, ((top, kh - 1 - top), (left, kw - 1 - left)), mode=mode, **pad_kw)
    return sliding_window_view(padded, (kh, kw))


def median_filter(img, kw=3, kh=3) -> np.ndarray:
    """Median over a kw x kh window with zero padding.

    For even window sizes the lower of the two middle values is taken.
    """
    img = as_gray(img)
    if kw < 1 or kh < 1:
        raise InvalidArgument("window sizes must be >= 1")
    win = _windows(img, kw, kh, "constant", constant_values=0.0).reshape(img.shape + (kw * kh,))
    k = (kw * kh - 1) // 2
    return np.partition(win, k, axis=-1)[..., k]


def gaussian_kernel1d(sigma) -> np.ndarray:
    half = int(np.ceil(3.0 * sigma))
    x = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def gaussian_blur(img, sigma) -> np.ndarray:
    """Separable Gaussian blur, half-width ceil(3 sigma), replicate padding."""
    img = as_gray(img)
    if sigma <= 0:
        raise InvalidArgument("sigma must be positive")
    k = gaussian_kernel1d(sigma)
    out = ndimage.correlate1d(img, k, axis=0, mode="nearest")
    return ndimage.correlate1d(out, k, axis=1, mode="nearest")


def unsharp_mask(img, radius=1.0, amount=0.8) -> np.ndarray:
    img = as_gray(img)
    if radius <= 0 or amount < 0:
        raise InvalidArgument("need radius > 0 and amount >= 0")
    if amount == 0:
        return img.copy()
    return np.clip(img + amount * (img - gaussian_blur(img, radius)), 0.0, 1.0)


def _local_mean(img, kw, kh) -> np.ndarray:
    # zero padding; the window is anchored like the median filter's
    win = _windows(img, kw, kh, "constant", constant_values=0.0)
    return win.mean(axis=(-2, -1))


def wiener_adaptive(img, kw=3, kh=3) -> np.ndarray:
    """Pixelwise adaptive Wiener filter with the noise power estimated as
    the mean of all local variances (zero padding)."""
    img = as_gray(img)
    if kw < 1 or kh < 1:
        raise InvalidArgument("window sizes must be >= 1")
    mu = _local_mean(img, kw, kh)
    var = np.maximum(_local_mean(img * img, kw, kh) - mu * mu, 0.0)
    noise = var.mean()
    denom = np.maximum(var, noise)
    gain = np.divide(np.maximum(var - noise, 0.0), denom, out=np.zeros_like(var), where=denom > 0)
    return np.clip(mu + gain * (img - mu), 0.0, 1.0)


def std_filter(img, kw=3, kh=3) -> np.ndarray:
    """Local sample standard deviation (n-1), symmetric padding."""
    img = as_gray(img)
    if kw < 1 or kh < 1 or kw % 2 == 0 or kh % 2 == 0:
        raise InvalidArgument("window sizes must be odd and >= 1")
    n = kw * kh
    if n == 1:
        return np.zeros_like(img)
    win = _windows(img, kw, kh, "symmetric")
    # shifting by the center value leaves the std unchanged and makes flat
    # windows exactly zero
    win = win - img[..., None, None]
    return win.std(axis=(-2, -1), ddof=1)


def derivatives(img, kernel="sobel"):
    """(gx, gy) of the 3x3 Sobel or Prewitt kernels, replicate padding.

    Differences are taken before smoothing so flat regions give exact zeros.
    """
    weights = {"sobel": (1.0, 2.0, 1.0), "prewitt": (1.0, 1.0, 1.0)}.get(kernel)
    if weights is None:
        raise InvalidArgument(f"unknown gradient kernel {kernel!r}")
    a, b, c = weights
    p = np.pad(as_gray(img), 1, mode="edge")
    dx = p[:, 2:] - p[:, :-2]
    dy = p[2:, :] - p[:-2, :]
    gx = a * dx[:-2] + b * dx[1:-1] + c * dx[2:]
    gy = a * dy[:, :-2] + b * dy[:, 1:-1] + c * dy[:, 2:]
    return gx, gy


def gradient(img, kernel="sobel"):
    """Gradient magnitude and direction in degrees, replicate padding.

    Direction is ``atan2(-Gy, Gx)`` so that angles are measured
    counter-clockwise with the image y axis pointing down.
    """
    img = as_gray(img)
    gx, gy = derivatives(img, kernel)
    magnitude = np.hypot(gx, gy)
    direction = np.degrees(np.arctan2(-gy, gx))
    direction[direction == -180.0] = 180.0
    return magnitude, direction


@dataclass(frozen=True)
class NoiseModel:
    """Synthetic noise description.

    ``kind`` is one of ``gaussian``, ``salt_pepper``, ``poisson`` or
    ``speckle``.  Unused parameters are ignored.
    """

    kind: str = "gaussian"
    mean: float = 0.0
    variance: float | None = None
    density: float = 0.05
    seed: int | None = 0

    def __post_init__(self):
        if self.kind not in ("gaussian", "salt_pepper", "poisson", "speckle"):
            raise InvalidArgument(f"unknown noise kind {self.kind!r}")
        if self.variance is None:
            object.__setattr__(self, "variance", 0.05 if self.kind == "speckle" else 0.01)
        if self.variance < 0:
            raise InvalidArgument("variance must be >= 0")
        if not 0.0 <= self.density <= 1.0:
            raise InvalidArgument("density must lie in [0, 1]")


def add_noise(img, model: NoiseModel) -> np.ndarray:
    img = as_gray(img)
    rng = np.random.default_rng(model.seed)
    if model.kind == "gaussian":
        out = img + rng.normal(model.mean, np.sqrt(model.variance), img.shape)
    elif model.kind == "salt_pepper":
        u = rng.random(img.shape)
        out = img.copy()
        out[u < model.density / 2] = 0.0
        out[(u >= model.density / 2) & (u < model.density)] = 1.0
    elif model.kind == "poisson":
        out = rng.poisson(img * 255.0) / 255.0
    else:
        half_width = np.sqrt(3.0 * model.variance)
        out = img + img * rng.uniform(-half_width, half_width, img.shape)
    return np.clip(out, 0.0, 1.0)


def repair_black_spots(img, threshold=30 / 255, replacement=70 / 255) -> np.ndarray:
    """Replace depth-sensor dropouts (pixels below ``threshold``)."""
    img = as_gray(img)
    if not (0.0 <= threshold <= 1.0 and 0.0 <= replacement <= 1.0):
        raise InvalidArgument("threshold and replacement must lie in [0, 1]")
    return np.where(img < threshold, replacement, img)
