"""File I/O: PGM (P5, 8/16-bit), PNG (8-bit gray or RGB), NPY, kernel text.

Intensities on disk map linearly to [0, 1]. Saving clamps to [0, 1] before
quantizing; NPY files carry float64 pixels losslessly.
"""

from __future__ import annotations

import os
import re

import numpy as np
from PIL import Image as PILImage

from .image import Image, Kernel, PriorPatch, rgb_to_luma

__all__ = [
    "load_image",
    "save_image",
    "load_kernel_text",
    "save_kernel_text",
    "load_patch_text",
]

KERNEL_LOAD_SUM_TOL = 1e-6


def _infer_format(path: str, fmt: str | None) -> str:
    if fmt is not None:
        return fmt.lower().lstrip(".")
    ext = os.path.splitext(path)[1].lower().lstrip(".")
    if ext in ("pgm", "png", "npy"):
        return ext
    raise ValueError(f"cannot infer image format from path {path!r}")


def load_image(path: str, fmt: str | None = None) -> Image:
    """Load a PGM/PNG/NPY file as a grayscale image with intensities in [0, 1].

    RGB PNGs are converted to luma; 16-bit PGMs keep their full depth.
    """
    fmt = _infer_format(path, fmt)
    if fmt == "pgm":
        return _load_pgm(path)
    if fmt == "png":
        return _load_png(path)
    if fmt == "npy":
        return Image(np.load(path))
    raise ValueError(f"unsupported image format {fmt!r}")


def save_image(image: Image, path: str, fmt: str | None = None, bits: int = 16) -> None:
    """Save an image, clamping to [0, 1]. PGM honors `bits` (8 or 16); PNG is 8-bit."""
    fmt = _infer_format(path, fmt)
    if fmt == "pgm":
        _save_pgm(image, path, bits)
    elif fmt == "png":
        clamped = np.clip(image.pixels, 0.0, 1.0)
        data = np.rint(clamped * 255.0).astype(np.uint8)
        PILImage.fromarray(data, mode="L").save(path, format="PNG")
    elif fmt == "npy":
        np.save(path, image.pixels)
    else:
        raise ValueError(f"unsupported image format {fmt!r}")


def _save_pgm(image: Image, path: str, bits: int) -> None:
    if bits == 8:
        maxval, dtype = 255, np.uint8
    elif bits == 16:
        maxval, dtype = 65535, ">u2"
    else:
        raise ValueError(f"PGM bit depth must be 8 or 16, got {bits}")
    clamped = np.clip(image.pixels, 0.0, 1.0)
    data = np.rint(clamped * maxval).astype(dtype)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{image.width} {image.height}\n{maxval}\n".encode("ascii"))
        fh.write(data.tobytes())


def _load_pgm(path: str) -> Image:
    with open(path, "rb") as fh:
        raw = fh.read()
    # Header: magic, width, height, maxval; '#' comments allowed between tokens.
    tokens = []
    pos = 0
    while len(tokens) < 4:
        match = re.match(rb"\s*(#[^\n]*\n|\S+)", raw[pos:])
        if match is None:
            raise ValueError(f"{path}: truncated PGM header")
        pos += match.end()
        token = match.group(1)
        if not token.startswith(b"#"):
            tokens.append(token)
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = (int(t) for t in tokens[1:])
    if maxval < 1 or maxval > 65535:
        raise ValueError(f"{path}: unsupported PGM maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height
    data = np.frombuffer(raw, dtype=dtype, count=count, offset=pos)
    if data.size != count:
        raise ValueError(f"{path}: truncated PGM pixel data")
    pixels = data.reshape(height, width).astype(np.float64) / maxval
    return Image(pixels)


def _load_png(path: str) -> Image:
    with PILImage.open(path) as img:
        if img.mode == "L":
            return Image(np.asarray(img, dtype=np.float64) / 255.0)
        if img.mode in ("I;16", "I"):
            return Image(np.asarray(img, dtype=np.float64) / 65535.0)
        if img.mode in ("RGB", "RGBA"):
            arr = np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
            return rgb_to_luma(arr)
        raise ValueError(f"{path}: unsupported PNG mode {img.mode!r}")


def save_kernel_text(k: Kernel, path: str) -> None:
    """Write a kernel as plain text: 'rows cols' then row-major taps."""
    lines = [f"{k.size_h} {k.size_w}"]
    for row in k.taps:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _read_taps_text(path: str) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: missing kernel header")
    rows, cols = int(tokens[0]), int(tokens[1])
    values = np.array([float(t) for t in tokens[2:]], dtype=np.float64)
    if values.size != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} taps, found {values.size}")
    return values.reshape(rows, cols)


def load_kernel_text(path: str) -> Kernel:
    """Parse a plain-text kernel, re-normalizing to sum 1 (rejects sums off by > 1e-6)."""
    taps = _read_taps_text(path)
    if taps.min() < 0.0:
        raise ValueError(f"{path}: negative kernel tap")
    total = taps.sum()
    if abs(total - 1.0) > KERNEL_LOAD_SUM_TOL:
        raise ValueError(f"{path}: kernel taps sum to {total!r}, expected 1 within {KERNEL_LOAD_SUM_TOL}")
    return Kernel(taps / total)


def load_patch_text(path: str) -> PriorPatch:
    """Parse a prior correlation patch from the same text layout as kernels.

    No normalization: patch invariants (symmetry, nonnegative transfer) are
    checked by the constructor instead of a sum rule.
    """
    return PriorPatch(_read_taps_text(path))
