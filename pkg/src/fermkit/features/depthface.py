"""Face extraction from depth maps (darker = closer to the sensor)."""

from __future__ import annotations

import numpy as np

from ..enhance import std_filter
from ..errors import InvalidArgument, NoFaceFound
from ..imgcore import as_gray

BLACK_SPOT_FLOOR = 30 / 255
STD_THRESHOLD = 0.02
ELLIPSE_SIGMAS = 2.0


def find_nose_tip(depth) -> tuple[int, int]:
    """(row, col) of the smallest value among pixels above the black-spot floor."""
    depth = as_gray(depth)
    valid = depth > BLACK_SPOT_FLOOR
    if not valid.any():
        raise NoFaceFound("no pixel above the black-spot floor")
    masked = np.where(valid, depth, np.inf)
    r, c = np.unravel_index(np.argmin(masked), depth.shape)
    return int(r), int(c)


def ellipse_mask(fg: np.ndarray, sigmas=ELLIPSE_SIGMAS) -> np.ndarray:
    """Moments ellipse of a boolean mask: points within ``sigmas`` Mahalanobis units."""
    rr, cc = np.nonzero(fg)
    pts = np.column_stack([rr, cc]).astype(np.float64)
    mean = pts.mean(axis=0)
    cov = np.cov(pts, rowvar=False, bias=True) if len(pts) > 1 else np.zeros((2, 2))
    cov = cov + 1e-6 * np.eye(2)  # a line or single pixel still gives a valid ellipse
    inv = np.linalg.inv(cov)
    gr, gc = np.mgrid[: fg.shape[0], : fg.shape[1]]
    d = np.stack([gr - mean[0], gc - mean[1]], axis=-1)
    maha = np.einsum("...i,ij,...j->...", d, inv, d)
    return maha <= sigmas * sigmas


def extract_depth_face(depth, crop_half_width=40, side_trim=0.1, ellipse_sigmas=ELLIPSE_SIGMAS):
    """Nose-tip crop, std-filter foreground, ellipse mask, then side trim."""
    depth = as_gray(depth)
    if crop_half_width < 1:
        raise InvalidArgument("crop_half_width must be >= 1")
    if not 0 <= side_trim < 0.5:
        raise InvalidArgument("side_trim must be in [0, 0.5)")
    r, c = find_nose_tip(depth)
    h, w = depth.shape
    r0, r1 = max(0, r - crop_half_width), min(h, r + crop_half_width + 1)
    c0, c1 = max(0, c - crop_half_width), min(w, c + crop_half_width + 1)
    work = depth[r0:r1, c0:c1].copy()
    fg = std_filter(work, 5, 5) > STD_THRESHOLD
    if not fg.any():
        raise NoFaceFound("standard-deviation filter found no face structure")
    inside = ellipse_mask(fg, ellipse_sigmas)
    work[~inside] = 0.0
    rows = np.nonzero(inside.any(axis=1))[0]
    cols = np.nonzero(inside.any(axis=0))[0]
    work = work[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]
    th, tw = int(side_trim * work.shape[0]), int(side_trim * work.shape[1])
    return work[th:work.shape[0] - th, tw:work.shape[1] - tw]
