"""Synthetic degradation (blur + seeded Gaussian noise) and blur-kernel synthesis.

Kernel families: random-walk camera trajectories, anti-aliased uniform disks,
and truncated Gaussians. Generated kernels are re-centered so the blur adds no
net translation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve as _ndconvolve

from .image import Image, Kernel
from .operator import convolve_circular

__all__ = [
    "DegradeConfig",
    "KernelGenConfig",
    "degrade",
    "gen_trajectory_kernel",
    "gen_disk_kernel",
    "gen_gaussian_kernel",
    "generate_kernel",
    "NOISE_RNG_ALGORITHM",
]

# Recorded in run manifests so outputs stay reproducible across machines.
NOISE_RNG_ALGORITHM = "numpy-PCG64"

_TRAJECTORY_STEPS = 64
_TRAJECTORY_STEP_STD = 0.75
_SUPPORT_THRESHOLD = 1e-4


@dataclass(frozen=True)
class DegradeConfig:
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.noise_sigma < 0.0:
            raise ValueError(f"noise_sigma must be nonnegative, got {self.noise_sigma}")


@dataclass(frozen=True)
class KernelGenConfig:
    size: int = 21
    seed: int = 0
    family: str = "trajectory"

    def __post_init__(self):
        if self.size < 3 or self.size % 2 == 0:
            raise ValueError(f"kernel size must be an odd integer >= 3, got {self.size}")
        if self.family not in ("trajectory", "disk", "gaussian"):
            raise ValueError(f"unknown kernel family {self.family!r}")


def degrade(x: Image, k: Kernel, cfg: DegradeConfig) -> Image:
    """Blur `x` with `k` and add i.i.d. Gaussian noise from a seeded PRNG."""
    blurred = convolve_circular(x, k).pixels
    if cfg.noise_sigma > 0.0:
        rng = np.random.default_rng(cfg.seed)
        blurred = blurred + rng.normal(0.0, cfg.noise_sigma, size=blurred.shape)
    return Image(blurred)


def _smooth_3x3(grid: np.ndarray) -> np.ndarray:
    coords = np.arange(-1, 2)
    g = np.exp(-(coords[:, None] ** 2 + coords[None, :] ** 2) / (2.0 * 0.5**2))
    return _ndconvolve(grid, g / g.sum(), mode="constant", cval=0.0)


def _splat_bilinear(points: np.ndarray, size: int) -> np.ndarray:
    grid = np.zeros((size, size))
    base = np.floor(points).astype(int)
    frac = points - base
    for di, dj in ((0, 0), (0, 1), (1, 0), (1, 1)):
        rows = base[:, 0] + di
        cols = base[:, 1] + dj
        weights = (frac[:, 0] if di else 1.0 - frac[:, 0]) * (
            frac[:, 1] if dj else 1.0 - frac[:, 1]
        )
        inside = (rows >= 0) & (rows < size) & (cols >= 0) & (cols < size)
        np.add.at(grid, (rows[inside], cols[inside]), weights[inside])
    return grid


def _rasterize_trajectory(points: np.ndarray, size: int) -> np.ndarray:
    center = (size - 1) / 2.0
    shift = np.zeros(2)
    grid = np.zeros((size, size))
    # Up to three re-centering passes: border truncation can push the center
    # of mass off the grid center, so steer the splat until it sits within
    # a quarter pixel.
    for _ in range(3):
        grid = _splat_bilinear(points + shift + center, size)
        total = grid.sum()
        if total <= 0.0:
            break
        com_r = (grid.sum(axis=1) @ np.arange(size)) / total
        com_c = (grid.sum(axis=0) @ np.arange(size)) / total
        offset = np.array([center - com_r, center - com_c])
        if np.abs(offset).max() < 0.25:
            break
        shift += offset
    return grid


def gen_trajectory_kernel(cfg: KernelGenConfig) -> Kernel:
    """Random camera-shake kernel: a Gaussian-increment 2-D walk, splatted with
    bilinear weights, lightly smoothed, and normalized.

    Degenerate draws (all mass on one tap) retry with an incremented seed.
    """
    for attempt in range(10):
        rng = np.random.default_rng(cfg.seed + attempt)
        steps = rng.normal(0.0, _TRAJECTORY_STEP_STD, size=(_TRAJECTORY_STEPS, 2))
        points = np.cumsum(steps, axis=0)
        points -= points.mean(axis=0)
        grid = _rasterize_trajectory(points, cfg.size)
        grid = np.clip(_smooth_3x3(grid), 0.0, None)
        total = grid.sum()
        if total <= 0.0:
            continue
        grid /= total
        if np.count_nonzero(grid > _SUPPORT_THRESHOLD) >= 2:
            return Kernel(grid)
    raise RuntimeError(f"trajectory kernel generation degenerate for seed {cfg.seed}")


def gen_disk_kernel(radius: float) -> Kernel:
    """Uniform disk kernel with an anti-aliased rim (subpixel coverage fractions)."""
    if not radius > 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    half = max(0, math.ceil(radius - 0.5))
    size = 2 * half + 1
    subdiv = 16
    offsets = (np.arange(subdiv) + 0.5) / subdiv - 0.5
    centers = np.arange(size) - half
    # Coverage = count of subsamples inside the disk; integer counts keep the
    # kernel exactly symmetric under 90-degree rotation.
    ys = (centers[:, None] + offsets[None, :]).reshape(size, 1, subdiv, 1)
    xs = (centers[:, None] + offsets[None, :]).reshape(1, size, 1, subdiv)
    inside = (ys**2 + xs**2) <= radius**2
    coverage = inside.sum(axis=(2, 3)).astype(np.float64)
    return Kernel(coverage / coverage.sum())


def gen_gaussian_kernel(size: int, sigma: float | None = None) -> Kernel:
    """Truncated, normalized Gaussian kernel (default sigma = size / 6)."""
    if size < 1 or size % 2 == 0:
        raise ValueError(f"size must be a positive odd integer, got {size}")
    if sigma is None:
        sigma = size / 6.0
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    coords = np.arange(size) - size // 2
    g = np.exp(-(coords[:, None] ** 2 + coords[None, :] ** 2) / (2.0 * sigma**2))
    return Kernel(g / g.sum())


def generate_kernel(cfg: KernelGenConfig) -> Kernel:
    """Dispatch on cfg.family; disk radius fills the grid, gaussian uses size/6."""
    if cfg.family == "trajectory":
        return gen_trajectory_kernel(cfg)
    if cfg.family == "disk":
        return gen_disk_kernel((cfg.size - 1) / 2.0)
    return gen_gaussian_kernel(cfg.size)
