"""Uniform local binary pattern cell histograms."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument
from ..imgcore import as_gray

N_BINS = 59

# neighbor (drow, dcol) in clockwise order starting at the top-left
NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1))


def _transitions(code: int) -> int:
    bits = [(code >> k) & 1 for k in range(8)]
    return sum(bits[k] != bits[(k + 1) % 8] for k in range(8))


def _uniform_table() -> np.ndarray:
    table = np.full(256, N_BINS - 1, dtype=np.intp)
    uniform = [c for c in range(256) if _transitions(c) <= 2]
    assert len(uniform) == N_BINS - 1
    for b, c in enumerate(uniform):
        table[c] = b
    return table


UNIFORM_BIN = _uniform_table()


def lbp_codes(img) -> np.ndarray:
    """8-bit codes for interior pixels; bit k is set iff neighbor k >= center.

    Returns an array of shape (H-2, W-2).
    """
    img = as_gray(img)
    h, w = img.shape
    if h < 3 or w < 3:
        raise InvalidArgument("LBP needs an image of at least 3x3")
    center = img[1:-1, 1:-1]
    codes = np.zeros(center.shape, dtype=np.intp)
    for k, (dr, dc) in enumerate(NEIGHBORS):
        nb = img[1 + dr:h - 1 + dr, 1 + dc:w - 1 + dc]
        codes |= (nb >= center).astype(np.intp) << k
    return codes


def lbp_features(img, cell_w=16, cell_h=16) -> np.ndarray:
    """Concatenated, L2-normalized 59-bin uniform LBP cell histograms.

    Cells tile the image left-to-right, top-to-bottom; partial cells are
    dropped and the 1-pixel image border casts no votes.
    """
    img = as_gray(img)
    h, w = img.shape
    if cell_w < 3 or cell_h < 3:
        raise InvalidArgument("cell dimensions must be >= 3")
    if h < cell_h or w < cell_w:
        raise InvalidArgument("image is smaller than one cell")
    bins = np.full((h, w), -1, dtype=np.intp)
    bins[1:-1, 1:-1] = UNIFORM_BIN[lbp_codes(img)]
    ny, nx = h // cell_h, w // cell_w
    out = np.zeros((ny, nx, N_BINS))
    for cy in range(ny):
        for cx in range(nx):
            cell = bins[cy * cell_h:(cy + 1) * cell_h, cx * cell_w:(cx + 1) * cell_w].ravel()
            cell = cell[cell >= 0]
            hist = np.bincount(cell, minlength=N_BINS).astype(np.float64)
            norm = np.linalg.norm(hist)
            if norm > 0:
                hist /= norm
            out[cy, cx] = hist
    return out.ravel()


def lbp_histogram256(img) -> np.ndarray:
    """Plain normalized histogram of raw 8-bit codes over the whole image."""
    codes = lbp_codes(img)
    hist = np.bincount(codes.ravel(), minlength=256).astype(np.float64)
    return hist / hist.sum()
