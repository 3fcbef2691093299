"""2-D DFT helpers and the Butterworth band filter built on them."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidArgument
from .imgcore import as_gray


@dataclass(frozen=True)
class Spectrum:
    coeffs: np.ndarray  # complex, shape (height, width)
    centered: bool = False

    @property
    def height(self) -> int:
        return self.coeffs.shape[0]

    @property
    def width(self) -> int:
        return self.coeffs.shape[1]


def fft2(img, pad_w=None, pad_h=None) -> Spectrum:
    """Uncentered 2-D DFT of ``img`` zero-padded to ``pad_h x pad_w``."""
    img = np.asarray(img, dtype=np.float64) if not np.iscomplexobj(img) else np.asarray(img)
    h, w = img.shape
    pad_h = h if pad_h is None else pad_h
    pad_w = w if pad_w is None else pad_w
    if pad_h < h or pad_w < w:
        raise InvalidArgument("padded size must not be smaller than the image")
    return Spectrum(np.fft.fft2(img, s=(pad_h, pad_w)), centered=False)


def ifft2(spec: Spectrum) -> np.ndarray:
    """Inverse DFT; the spectrum must be uncentered."""
    coeffs = spec.coeffs if not spec.centered else _roll(spec.coeffs, inverse=True)
    return np.fft.ifft2(coeffs)


def _roll(a, inverse=False):
    h, w = a.shape
    sh, sw = h // 2, w // 2
    if inverse:
        sh, sw = -sh, -sw
    return np.roll(np.roll(a, sh, axis=0), sw, axis=1)


def fftshift(spec: Spectrum) -> Spectrum:
    """Move the DC bin to (floor(H/2), floor(W/2))."""
    return replace(spec, coeffs=_roll(spec.coeffs), centered=not spec.centered)


def ifftshift(spec: Spectrum) -> Spectrum:
    return replace(spec, coeffs=_roll(spec.coeffs, inverse=True), centered=not spec.centered)


def butterworth_lowpass_gain(dist, cutoff, order):
    return 1.0 / (1.0 + (np.asarray(dist, dtype=np.float64) / cutoff) ** (2 * order))


def butterworth_filter(nx, ny, d0, d1, order) -> np.ndarray:
    """Band gain ``lp(d1) * (1 - lp(d0))`` on the (2nx-1, 2ny-1) grid.

    Distances are measured from the 1-based index (nx+1, ny+1), as in the
    reference filter routine, which sits one bin past the shifted DC bin.
    """
    i = np.arange(1, 2 * nx)[:, None]
    j = np.arange(1, 2 * ny)[None, :]
    dist = np.sqrt((i - (nx + 1)) ** 2 + (j - (ny + 1)) ** 2)
    return butterworth_lowpass_gain(dist, d1, order) * (1.0 - butterworth_lowpass_gain(dist, d0, order))


def butterworth_response(img, d0, d1, order=2) -> np.ndarray:
    """Unclamped real output of the Butterworth band routine (nx x ny)."""
    img = as_gray(img)
    if d0 <= 0 or d1 <= 0:
        raise InvalidArgument("cutoff frequencies must be positive")
    if order < 1:
        raise InvalidArgument("filter order must be >= 1")
    nx, ny = img.shape
    spec = fftshift(fft2(img, 2 * ny - 1, 2 * nx - 1))
    band = butterworth_filter(nx, ny, d0, d1, order)
    # the routine adds the band-weighted spectrum back onto the original
    boosted = replace(spec, coeffs=spec.coeffs + band * spec.coeffs)
    out = ifft2(ifftshift(boosted))
    return np.real(out[:nx, :ny])


def butterworth_bandpass(img, d0, d1, order=2) -> np.ndarray:
    """Frequency-domain filtering with the Butterworth band gain.

    ``(2, 10, 2)`` behaves as a low-pass and ``(3, 300, 5)`` as a
    high-pass emphasis.  Output is clamped to [0, 1].
    """
    return np.clip(butterworth_response(img, d0, d1, order), 0.0, 1.0)
