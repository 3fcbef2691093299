"""Deterministic synthetic color+depth face corpus for smoke runs.

Each class draws a cartoon face whose mouth and brow shapes depend on the
class; the depth map is a dome with a nose bump and a class-specific mouth
relief.  Per-sample position jitter and noise come from a seeded RNG.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..imgcore import save_image

CLASS_NAMES = ("anger", "joy", "sadness", "surprise")
SKIN = np.array([0.85, 0.66, 0.55])
BACKGROUND = np.array([0.25, 0.35, 0.45])


def _mouth_mask(cls: str, yy, xx, cy, cx, s):
    u = (xx - cx) / s
    v = (yy - cy) / s
    band = np.abs(u) < 0.35
    if cls == "joy":
        return band & (np.abs(v - 0.45 - 0.9 * u ** 2) < 0.05)
    if cls == "sadness":
        return band & (np.abs(v - 0.55 + 0.9 * u ** 2) < 0.05)
    if cls == "surprise":
        return ((u / 0.14) ** 2 + ((v - 0.5) / 0.18) ** 2) < 1.0
    return band & (np.abs(v - 0.5) < 0.035)  # anger: tight flat mouth


def _brow_mask(cls: str, yy, xx, cy, cx, s):
    out = np.zeros(yy.shape, dtype=bool)
    for side in (-1.0, 1.0):
        u = (xx - cx) / s - side * 0.3
        v = (yy - cy) / s + 0.35
        tilt = {"anger": 0.6 * side, "sadness": -0.6 * side, "surprise": 0.0, "joy": 0.0}[cls]
        lift = -0.1 if cls == "surprise" else 0.0
        out |= (np.abs(u) < 0.15) & (np.abs(v - lift - tilt * u) < 0.035)
    return out


def render_pair(cls: str, size: int, rng):
    """(rgb, depth) arrays for one sample of class ``cls``."""
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    cy = size / 2 + rng.uniform(-2, 2)
    cx = size / 2 + rng.uniform(-2, 2)
    s = size * rng.uniform(0.36, 0.40)  # face half-height
    r2 = ((xx - cx) / (0.8 * s)) ** 2 + ((yy - cy) / s) ** 2
    face = r2 < 1.0
    rgb = np.where(face[..., None], SKIN, BACKGROUND) * rng.uniform(0.9, 1.1)
    eyes = np.zeros_like(face)
    for side in (-1.0, 1.0):
        eyes |= (((xx - cx) / s - side * 0.3) ** 2 + ((yy - cy) / s + 0.2) ** 2) < 0.07 ** 2
    dark = eyes | _mouth_mask(cls, yy, xx, cy, cx, s) | _brow_mask(cls, yy, xx, cy, cx, s)
    rgb[dark & face] = (0.15, 0.08, 0.08)
    rgb = np.clip(rgb + rng.normal(0.0, 0.03, rgb.shape), 0.0, 1.0)

    # smaller depth = closer to the sensor
    depth = np.full((size, size), 0.9)
    dome = 0.55 + 0.3 * r2
    nose = 0.2 * np.exp(-(((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * (0.12 * s) ** 2)))
    relief = 0.08 * _mouth_mask(cls, yy, xx, cy, cx, s) - 0.04 * _brow_mask(cls, yy, xx, cy, cx, s)
    depth = np.where(face, dome - nose + relief, depth)
    depth = np.clip(depth + rng.normal(0.0, 0.01, depth.shape), 0.0, 1.0)
    return rgb, depth


def make_corpus(out_dir, per_class=20, size=64, seed=0, classes=CLASS_NAMES) -> Path:
    """Write <out>/<class>/<class>_<nn>_color.png and ..._depth.pgm."""
    root = Path(out_dir)
    rng = np.random.default_rng(seed)
    for cls in classes:
        cdir = root / cls
        cdir.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            rgb, depth = render_pair(cls, size, rng)
            stem = f"{cls}_{i:02d}"
            save_image(rgb, cdir / f"{stem}_color.png")
            save_image(depth, cdir / f"{stem}_depth.pgm")
    return root
