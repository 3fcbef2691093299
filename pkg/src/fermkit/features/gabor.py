"""Gabor filter bank and the downsampled magnitude feature vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from ..errors import InvalidArgument
from ..imgcore import as_gray

FMAX = 0.25
GAMMA = np.sqrt(2.0)
ETA = np.sqrt(2.0)


@dataclass(frozen=True)
class GaborBank:
    kernels: np.ndarray  # complex, (u, v, m, n)
    freqs: np.ndarray  # per-scale center frequency

    @property
    def u(self) -> int:
        return self.kernels.shape[0]

    @property
    def v(self) -> int:
        return self.kernels.shape[1]

    def __len__(self):
        return self.u * self.v


def gabor_kernel(f, theta, m, n) -> np.ndarray:
    alpha, beta = f / GAMMA, f / ETA
    x = np.arange(1, m + 1)[:, None] - (m + 1) / 2.0
    y = np.arange(1, n + 1)[None, :] - (n + 1) / 2.0
    xp = x * np.cos(theta) + y * np.sin(theta)
    yp = -x * np.sin(theta) + y * np.cos(theta)
    env = (f * f / (np.pi * GAMMA * ETA)) * np.exp(-(alpha ** 2 * xp ** 2 + beta ** 2 * yp ** 2))
    return env * np.exp(2j * np.pi * f * xp)


def gabor_bank(u=5, v=8, m=39, n=39) -> GaborBank:
    if u < 1 or v < 1:
        raise InvalidArgument("bank needs at least one scale and one orientation")
    if m % 2 == 0 or n % 2 == 0:
        raise InvalidArgument("Gabor kernel dimensions must be odd")
    freqs = FMAX / np.sqrt(2.0) ** np.arange(u)
    kernels = np.empty((u, v, m, n), dtype=np.complex128)
    for i in range(u):
        for j in range(v):
            kernels[i, j] = gabor_kernel(freqs[i], j * np.pi / v, m, n)
    return GaborBank(kernels, freqs)


def gabor_responses(img, bank: GaborBank) -> np.ndarray:
    """Magnitudes of the 'same'-size responses, shape (u, v, H, W)."""
    img = as_gray(img)
    out = np.empty((bank.u, bank.v) + img.shape)
    for i in range(bank.u):
        for j in range(bank.v):
            out[i, j] = np.abs(fftconvolve(img, bank.kernels[i, j], mode="same"))
    return out


def gabor_features(img, bank: GaborBank, d1=8, d2=8) -> np.ndarray:
    """Z-scored, downsampled response magnitudes, scale-major then orientation."""
    img = as_gray(img)
    rows, cols = img.shape
    if d1 < 1 or d2 < 1 or rows % d1 or cols % d2:
        raise InvalidArgument(f"d1={d1}, d2={d2} must divide the image size {rows}x{cols}")
    mags = gabor_responses(img, bank)
    blocks = []
    for i in range(bank.u):
        for j in range(bank.v):
            b = mags[i, j, ::d1, ::d2].ravel(order="F")
            mu, sd = b.mean(), b.std()
            # flat block (up to FFT round-off) -> zeros rather than amplified noise
            flat = sd <= 1e-12 * max(abs(mu), np.finfo(float).tiny)
            blocks.append(np.zeros_like(b) if flat else (b - mu) / sd)
    return np.concatenate(blocks)
