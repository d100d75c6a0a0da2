"""Quality metrics (PSNR, SSIM) and restoration losses (smooth-L1 content,
gradient-difference edge, weighted total).

Conventions: peak intensity 1.0 everywhere; SSIM follows the classic
11x11 Gaussian window (sigma 1.5) with K1 = 0.01, K2 = 0.03 and no border
padding; losses are per-pixel means so their magnitudes are resolution
independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate

from .image import Image

__all__ = [
    "QualityReport",
    "LossReport",
    "psnr",
    "ssim",
    "content_loss",
    "edge_loss",
    "total_loss",
    "evaluate_quality",
    "DEFAULT_ALPHA",
    "DEFAULT_GAMMA",
]

DEFAULT_ALPHA = 5000.0
DEFAULT_GAMMA = 100.0

_SSIM_WINDOW_SIZE = 11
_SSIM_SIGMA = 1.5
_SSIM_C1 = (0.01 * 1.0) ** 2
_SSIM_C2 = (0.03 * 1.0) ** 2


@dataclass(frozen=True)
class QualityReport:
    psnr_db: float
    ssim: float


@dataclass(frozen=True)
class LossReport:
    content: float
    edge: float
    total: float
    alpha: float
    gamma: float


def _check_same_shape(x_hat: Image, x: Image) -> None:
    if x_hat.shape != x.shape:
        raise ValueError(f"shape mismatch: {x_hat.shape} vs {x.shape}")


def psnr(x_hat: Image, x: Image) -> float:
    """Peak signal-to-noise ratio in dB with peak 1.0; +inf for identical inputs."""
    _check_same_shape(x_hat, x)
    mse = float(np.mean((x_hat.pixels - x.pixels) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def _ssim_window() -> np.ndarray:
    half = _SSIM_WINDOW_SIZE // 2
    coords = np.arange(-half, half + 1)
    g = np.exp(-(coords[:, None] ** 2 + coords[None, :] ** 2) / (2.0 * _SSIM_SIGMA**2))
    return g / g.sum()


def ssim(x_hat: Image, x: Image) -> float:
    """Mean local structural similarity over the interior (no border padding)."""
    _check_same_shape(x_hat, x)
    if min(x.shape) < _SSIM_WINDOW_SIZE:
        raise ValueError(f"image {x.shape} smaller than the {_SSIM_WINDOW_SIZE}x{_SSIM_WINDOW_SIZE} SSIM window")
    window = _ssim_window()
    half = _SSIM_WINDOW_SIZE // 2
    crop = (slice(half, -half), slice(half, -half))

    def local_mean(arr: np.ndarray) -> np.ndarray:
        return correlate(arr, window, mode="constant")[crop]

    a, b = x_hat.pixels, x.pixels
    mu_a = local_mean(a)
    mu_b = local_mean(b)
    var_a = local_mean(a * a) - mu_a**2
    var_b = local_mean(b * b) - mu_b**2
    cov = local_mean(a * b) - mu_a * mu_b
    ssim_map = ((2.0 * mu_a * mu_b + _SSIM_C1) * (2.0 * cov + _SSIM_C2)) / (
        (mu_a**2 + mu_b**2 + _SSIM_C1) * (var_a + var_b + _SSIM_C2)
    )
    return float(ssim_map.mean())


def content_loss(x_hat: Image, x: Image) -> float:
    """Mean smooth-L1 of the difference: 0.5 d^2 below |d| = 1, |d| - 0.5 above."""
    _check_same_shape(x_hat, x)
    d = np.abs(x_hat.pixels - x.pixels)
    per_pixel = np.where(d < 1.0, 0.5 * d**2, d - 0.5)
    return float(per_pixel.mean())


def edge_loss(x_hat: Image, x: Image) -> float:
    """Mean squared difference of forward-difference gradients (circular wrap)."""
    _check_same_shape(x_hat, x)

    def grads(arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        dh = np.roll(arr, -1, axis=1) - arr
        dv = np.roll(arr, -1, axis=0) - arr
        return dh, dv

    dh_hat, dv_hat = grads(x_hat.pixels)
    dh, dv = grads(x.pixels)
    return float(np.mean((dh_hat - dh) ** 2) + np.mean((dv_hat - dv) ** 2))


def total_loss(
    x_hat: Image, x: Image, alpha: float = DEFAULT_ALPHA, gamma: float = DEFAULT_GAMMA
) -> LossReport:
    """Weighted sum alpha * content + gamma * edge."""
    if alpha < 0.0 or gamma < 0.0:
        raise ValueError(f"loss weights must be nonnegative, got alpha={alpha}, gamma={gamma}")
    content = content_loss(x_hat, x)
    edge = edge_loss(x_hat, x)
    return LossReport(content, edge, alpha * content + gamma * edge, alpha, gamma)


def evaluate_quality(x_hat: Image, x: Image) -> QualityReport:
    return QualityReport(psnr(x_hat, x), ssim(x_hat, x))
