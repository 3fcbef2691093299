"""Full-reference image quality metrics reported in 8-bit units."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .errors import InvalidArgument
from .imgcore import as_gray

SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5


@dataclass(frozen=True)
class IqaReport:
    mse: float
    psnr: float
    ssim: float


def _pair(a, b):
    a, b = as_gray(a), as_gray(b)
    if a.shape != b.shape:
        raise InvalidArgument(f"image sizes differ: {a.shape} vs {b.shape}")
    return a * 255.0, b * 255.0


def mse(a, b) -> float:
    a, b = _pair(a, b)
    return float(np.mean((a - b) ** 2))


def psnr_from_mse(err: float, peak: float = 255.0) -> float:
    if err < 0:
        raise InvalidArgument("mse must be non-negative")
    if err == 0:
        return math.inf
    return 10.0 * math.log10(peak * peak / err)


def psnr(a, b, peak: float = 255.0) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical images."""
    return psnr_from_mse(mse(a, b), peak)


def _ssim_window():
    half = SSIM_WINDOW // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2 * SSIM_SIGMA ** 2))
    w = np.outer(g, g)
    return w / w.sum()


def ssim(a, b):
    """Mean SSIM and its map (valid-region, Gaussian 11x11 window)."""
    a, b = _pair(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise InvalidArgument(f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}")
    c1 = (SSIM_K1 * 255.0) ** 2
    c2 = (SSIM_K2 * 255.0) ** 2
    win = _ssim_window()

    def filt(x):
        return convolve2d(x, win, mode="valid")

    mu_a, mu_b = filt(a), filt(b)
    var_a = filt(a * a) - mu_a * mu_a
    var_b = filt(b * b) - mu_b * mu_b
    cov = filt(a * b) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    smap = num / den
    return float(smap.mean()), smap


def assess(reference, distorted) -> IqaReport:
    return IqaReport(mse(reference, distorted), psnr(reference, distorted), ssim(reference, distorted)[0])
