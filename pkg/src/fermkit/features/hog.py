"""Histogram of oriented gradients with 2x2-cell blocks."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument
from ..imgcore import as_gray

N_ORIENT = 9
BLOCK = 2
EPS = 1e-6


def cell_histograms(img, cell_w, cell_h) -> np.ndarray:
    """Unsigned 9-bin orientation histograms per cell, shape (ny, nx, 9).

    Gradients are centered differences with replicated borders and each
    pixel splits its magnitude between the two nearest bin centers.
    """
    img = as_gray(img)
    p = np.pad(img, 1, mode="edge")
    gx = p[1:-1, 2:] - p[1:-1, :-2]
    gy = p[2:, 1:-1] - p[:-2, 1:-1]
    mag = np.hypot(gx, gy)
    ang = np.mod(np.degrees(np.arctan2(gy, gx)), 180.0)
    width = 180.0 / N_ORIENT
    pos = ang / width - 0.5
    lo = np.floor(pos).astype(int)
    frac = pos - lo
    b0 = np.mod(lo, N_ORIENT)
    b1 = np.mod(lo + 1, N_ORIENT)
    h, w = img.shape
    ny, nx = h // cell_h, w // cell_w
    hist = np.zeros((ny, nx, N_ORIENT))
    for cy in range(ny):
        rs = slice(cy * cell_h, (cy + 1) * cell_h)
        for cx in range(nx):
            cs = slice(cx * cell_w, (cx + 1) * cell_w)
            m, f = mag[rs, cs].ravel(), frac[rs, cs].ravel()
            hist[cy, cx] = np.bincount(b0[rs, cs].ravel(), m * (1 - f), N_ORIENT)
            hist[cy, cx] += np.bincount(b1[rs, cs].ravel(), m * f, N_ORIENT)
    return hist


def hog_features(img, cell_w=16, cell_h=16) -> np.ndarray:
    """Block-normalized HOG descriptor of length blocks_x*blocks_y*36.

    Blocks are 2x2 cells with a one-cell stride, visited row by row;
    inside a block the four cell histograms are in row-major order.
    """
    img = as_gray(img)
    h, w = img.shape
    if h < BLOCK * cell_h or w < BLOCK * cell_w:
        raise InvalidArgument("image must span at least 2x2 cells")
    cells = cell_histograms(img, cell_w, cell_h)
    ny, nx = cells.shape[:2]
    blocks = []
    for by in range(ny - BLOCK + 1):
        for bx in range(nx - BLOCK + 1):
            v = cells[by:by + BLOCK, bx:bx + BLOCK].ravel()
            blocks.append(v / np.sqrt(v @ v + EPS * EPS))
    return np.concatenate(blocks)
