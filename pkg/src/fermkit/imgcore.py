"""Image containers, file I/O, gray conversion and resizing.

Images are plain numpy arrays of float64 intensities in [0, 1]:
``(H, W)`` for gray and ``(H, W, 3)`` for RGB.  The 0-255 domain only
exists at the file boundary.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InvalidArgument, UnsupportedFormat, WriteError

GRAY_WEIGHTS = np.array([0.2989, 0.5870, 0.1140])

_WHITESPACE = b" \t\r\n\v\f"


def is_gray(img) -> bool:
    return np.ndim(img) == 2


def is_rgb(img) -> bool:
    return np.ndim(img) == 3 and np.shape(img)[2] == 3


def as_gray(img) -> np.ndarray:
    """Validate and return ``img`` as a float64 2-D array."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidArgument(f"expected a gray image, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidArgument("image must be at least 1x1")
    return arr


def as_rgb(img) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InvalidArgument(f"expected an RGB image, got shape {arr.shape}")
    return arr


def from_uint8(data) -> np.ndarray:
    return np.asarray(data, dtype=np.float64) / 255.0


def to_uint8(img) -> np.ndarray:
    """Quantize [0,1] intensities with round-half-up and clamping."""
    q = np.floor(np.asarray(img, dtype=np.float64) * 255.0 + 0.5)
    return np.clip(q, 0, 255).astype(np.uint8)


def _read_pnm(raw: bytes, path) -> np.ndarray:
    magic = raw[:2]
    channels = {b"P5": 1, b"P6": 3}.get(magic)
    if channels is None:
        raise UnsupportedFormat(f"{path}: not a binary PGM/PPM file")
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(raw) and raw[pos] in _WHITESPACE:
            pos += 1
        if pos < len(raw) and raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and raw[pos] not in _WHITESPACE:
            pos += 1
        if start == pos:
            raise UnsupportedFormat(f"{path}: truncated header")
        tokens.append(raw[start:pos])
    pos += 1  # the single whitespace byte ending the header
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise UnsupportedFormat(f"{path}: malformed header") from None
    if maxval != 255:
        raise UnsupportedFormat(f"{path}: only 8-bit files (maxval 255) are supported")
    count = width * height * channels
    body = np.frombuffer(raw, dtype=np.uint8, count=count, offset=pos) if len(raw) - pos >= count else None
    if body is None or width < 1 or height < 1:
        raise UnsupportedFormat(f"{path}: pixel data truncated")
    if channels == 1:
        return body.reshape(height, width)
    return body.reshape(height, width, 3)


def load_image(path) -> np.ndarray:
    """Read a PGM (P5), PPM (P6) or 8-bit gray/RGB PNG file.

    Returns a ``(H, W)`` or ``(H, W, 3)`` float array scaled by 1/255.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image: {path}")
    raw = path.read_bytes()
    if raw[:2] in (b"P5", b"P6"):
        return from_uint8(_read_pnm(raw, path))
    if raw[:8] == b"\x89PNG\r\n\x1a\n":
        with Image.open(path) as im:
            if im.mode not in ("L", "RGB"):
                raise UnsupportedFormat(f"{path}: PNG mode {im.mode} is not 8-bit gray or RGB")
            return from_uint8(np.array(im))
    raise UnsupportedFormat(f"{path}: unrecognized image format")


def save_image(img, path) -> None:
    """Write an 8-bit image; format follows the suffix (.png, else PGM/PPM)."""
    path = Path(path)
    data = to_uint8(img)
    if data.ndim not in (2, 3) or (data.ndim == 3 and data.shape[2] != 3):
        raise InvalidArgument(f"cannot save array of shape {data.shape}")
    try:
        if path.suffix.lower() == ".png":
            Image.fromarray(data, mode="L" if data.ndim == 2 else "RGB").save(path)
            return
        h, w = data.shape[:2]
        magic = b"P5" if data.ndim == 2 else b"P6"
        with open(path, "wb") as fh:
            fh.write(magic + b"\n%d %d\n255\n" % (w, h))
            fh.write(np.ascontiguousarray(data).tobytes())
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}") from exc


def to_gray(img) -> np.ndarray:
    """Luma conversion with weights renormalized to sum to one."""
    rgb = as_rgb(img)
    w = GRAY_WEIGHTS / GRAY_WEIGHTS.sum()
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    # same weighted sum, arranged so that r == g == b returns g bit-exactly
    gray = g + w[0] * (r - g) + w[2] * (b - g)
    return np.clip(gray, 0.0, 1.0)


def ensure_gray(img) -> np.ndarray:
    """Return a gray version of either a gray or an RGB image."""
    return to_gray(img) if is_rgb(img) else as_gray(img)


def _bilinear_axis(n_in: int, n_out: int):
    # half-pixel centers, clamped to the edge samples
    src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0.0, n_in - 1)
    lo = np.floor(src).astype(int)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = src - lo
    return lo, hi, frac


def resize(img, new_w: int, new_h: int) -> np.ndarray:
    """Bilinear resize of a gray (or per-channel RGB) image."""
    if new_w < 1 or new_h < 1:
        raise InvalidArgument("target dimensions must be >= 1")
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 3:
        return np.stack([resize(arr[..., c], new_w, new_h) for c in range(arr.shape[2])], axis=-1)
    arr = as_gray(arr)
    h, w = arr.shape
    if (h, w) == (new_h, new_w):
        return arr.copy()
    r0, r1, fr = _bilinear_axis(h, new_h)
    c0, c1, fc = _bilinear_axis(w, new_w)
    top = arr[r0][:, c0] * (1 - fc) + arr[r0][:, c1] * fc
    bottom = arr[r1][:, c0] * (1 - fc) + arr[r1][:, c1] * fc
    out = top * (1 - fr)[:, None] + bottom * fr[:, None]
    # convex combinations can overshoot by an ulp
    return np.clip(out, arr.min(), arr.max())


def list_images(directory, pattern="*") -> list[str]:
    return sorted(str(p) for p in Path(directory).glob(pattern) if p.is_file())


__all__ = [
    "GRAY_WEIGHTS", "as_gray", "as_rgb", "ensure_gray", "from_uint8", "is_gray", "is_rgb",
    "list_images", "load_image", "resize", "save_image", "to_gray", "to_uint8",
]
