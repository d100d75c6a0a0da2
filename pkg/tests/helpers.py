"""Shared test utilities: seeded random inputs, brute-force reference
implementations, and a synthetic scene generator (no fixture files needed)."""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter

from irdeconv import Image, Kernel


def random_image(rng: np.random.Generator, height: int, width: int) -> Image:
    return Image(rng.uniform(0.0, 1.0, size=(height, width)))


def random_kernel(rng: np.random.Generator, size_h: int, size_w: int | None = None) -> Kernel:
    size_w = size_h if size_w is None else size_w
    taps = rng.uniform(0.0, 1.0, size=(size_h, size_w))
    return Kernel(taps / taps.sum())


def brute_force_convolve(pixels: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Double-loop circular convolution with explicit index wrapping: the
    convolution oracle (deliberately independent of the FFT path)."""
    height, width = pixels.shape
    kh, kw = taps.shape
    ch, cw = kh // 2, kw // 2
    out = np.zeros_like(pixels)
    for i in range(height):
        for j in range(width):
            acc = 0.0
            for u in range(kh):
                for v in range(kw):
                    acc += taps[u, v] * pixels[(i - u + ch) % height, (j - v + cw) % width]
            out[i, j] = acc
    return out


def make_scene(height: int, width: int, seed: int = 0) -> Image:
    """Synthetic natural-looking test scene: smooth shading, sharp geometric
    edges, and fine texture, normalized into [0.05, 0.95]."""
    rng = np.random.default_rng(seed)
    base = gaussian_filter(rng.uniform(size=(height, width)), sigma=8.0)
    rows = np.arange(height)[:, None]
    cols = np.arange(width)[None, :]
    for _ in range(6):
        r0, c0 = rng.integers(0, height), rng.integers(0, width)
        rh = int(rng.integers(height // 8, height // 3))
        cw = int(rng.integers(width // 8, width // 3))
        box = (rows >= r0) & (rows < r0 + rh) & (cols >= c0) & (cols < c0 + cw)
        base = base + rng.uniform(-0.4, 0.4) * box
    base = base + 0.05 * gaussian_filter(rng.standard_normal((height, width)), sigma=1.0)
    lo, hi = base.min(), base.max()
    return Image(0.05 + 0.9 * (base - lo) / (hi - lo))


def high_freq_fraction(pixels: np.ndarray) -> float:
    """Energy fraction above the median radial frequency of the half-spectrum."""
    height, width = pixels.shape
    power = np.abs(np.fft.fft2(pixels)) ** 2
    fr = np.minimum(np.arange(height), height - np.arange(height)) / height
    fc = np.minimum(np.arange(width), width - np.arange(width)) / width
    radius = np.sqrt(fr[:, None] ** 2 + fc[None, :] ** 2)
    cut = np.median(radius)
    total = power.sum()
    return float(power[radius > cut].sum() / total) if total > 0.0 else 0.0
