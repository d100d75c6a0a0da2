"""Circular-boundary blur operator: convolution, adjoint, spectrum, dense oracle.

The blur matrix is realized as block-circulant (periodic image extension), so
the 2-D DFT diagonalizes it exactly: convolution with kernel k multiplies each
frequency by the kernel's transfer function k_hat, and the adjoint multiplies
by its conjugate. The dense materialization is the ground-truth oracle for
everything downstream and is capped at 4096 pixels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .image import Image, Kernel, PriorPatch, flip_kernel

__all__ = [
    "Spectrum",
    "ConvergenceReport",
    "LinearBlurOperator",
    "convolve_circular",
    "apply_adjoint",
    "transfer_function",
    "convergence_factors",
    "materialize_operator",
    "DENSE_ORACLE_MAX_PIXELS",
]

# Complex per-frequency view of a circulant operator (same shape as the image).
Spectrum = np.ndarray

KernelLike = Union[Kernel, PriorPatch]

DENSE_ORACLE_MAX_PIXELS = 4096


def _check_fits(taps: np.ndarray, shape: tuple[int, int]) -> None:
    if taps.shape[0] > shape[0] or taps.shape[1] > shape[1]:
        raise ValueError(f"kernel {taps.shape} does not fit image shape {shape}")


def _embed_centered(taps: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    # Zero-pad to the image shape and circularly shift so the kernel center
    # lands at index (0, 0); the FFT of this array is the transfer function.
    padded = np.zeros(shape)
    padded[: taps.shape[0], : taps.shape[1]] = taps
    return np.roll(padded, (-(taps.shape[0] // 2), -(taps.shape[1] // 2)), axis=(0, 1))


def transfer_function(k: KernelLike, shape: tuple[int, int]) -> Spectrum:
    """Per-frequency multiplier of the circulant operator induced by `k` on `shape`."""
    _check_fits(k.taps, shape)
    return np.fft.fft2(_embed_centered(k.taps, shape))


def _spectral_conv(pixels: np.ndarray, multiplier: np.ndarray) -> np.ndarray:
    return np.fft.ifft2(np.fft.fft2(pixels) * multiplier).real


def convolve_circular(x: Image, k: Kernel) -> Image:
    """Periodic 2-D convolution of `x` with the centered kernel `k`."""
    _check_fits(k.taps, x.shape)
    return Image(_spectral_conv(x.pixels, transfer_function(k, x.shape)))


def apply_adjoint(y: Image, k: Kernel) -> Image:
    """Apply the adjoint blur operator: convolution with the 180-degree flip of `k`."""
    return convolve_circular(y, flip_kernel(k))


class ConvergenceReport(NamedTuple):
    """Per-frequency contraction factors of the residual iteration and their max."""

    factors: np.ndarray
    rho_max: float


def convergence_factors(
    k: Kernel, f_x: PriorPatch, sigma: float, shape: tuple[int, int]
) -> ConvergenceReport:
    """Contraction factor |sigma' - |k_hat|^2 c_hat| per frequency, sigma' = 1 - sigma.

    The residual series converges geometrically iff the maximum factor is < 1.
    """
    if not 0.0 < sigma < 1.0:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    k_hat = transfer_function(k, shape)
    c_hat = transfer_function(f_x, shape).real  # real by central symmetry
    factors = np.abs((1.0 - sigma) - np.abs(k_hat) ** 2 * c_hat)
    return ConvergenceReport(factors, float(factors.max()))


def materialize_operator(k: KernelLike, shape: tuple[int, int]) -> np.ndarray:
    """Dense (H*W) x (H*W) matrix M with M @ vec(x) = vec(convolve_circular(x, k)).

    vec is the row-major expansion. Oracle scale only: H*W <= 4096.
    """
    height, width = shape
    if height * width > DENSE_ORACLE_MAX_PIXELS:
        raise ValueError(
            f"shape {shape} exceeds the dense-oracle cap of {DENSE_ORACLE_MAX_PIXELS} pixels"
        )
    taps = k.taps
    _check_fits(taps, shape)
    center_h, center_w = taps.shape[0] // 2, taps.shape[1] // 2
    rows_i, cols_j = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    out_index = (rows_i * width + cols_j).ravel()
    matrix = np.zeros((height * width, height * width))
    for u in range(taps.shape[0]):
        for v in range(taps.shape[1]):
            src_r = (rows_i - (u - center_h)) % height
            src_c = (cols_j - (v - center_w)) % width
            matrix[out_index, (src_r * width + src_c).ravel()] += taps[u, v]
    return matrix


@dataclass(frozen=True)
class LinearBlurOperator:
    """The circular-boundary blur operator for one kernel on one image shape."""

    kernel: Kernel
    image_shape: tuple[int, int]
    boundary: str = field(default="circular")

    def __post_init__(self):
        if self.boundary != "circular":
            raise ValueError("only the circular boundary is supported")
        _check_fits(self.kernel.taps, self.image_shape)

    def apply(self, x: Image) -> Image:
        if x.shape != self.image_shape:
            raise ValueError(f"image shape {x.shape} does not match operator {self.image_shape}")
        return convolve_circular(x, self.kernel)

    def apply_adjoint(self, y: Image) -> Image:
        if y.shape != self.image_shape:
            raise ValueError(f"image shape {y.shape} does not match operator {self.image_shape}")
        return apply_adjoint(y, self.kernel)

    def spectrum(self) -> Spectrum:
        return transfer_function(self.kernel, self.image_shape)

    def dense(self) -> np.ndarray:
        return materialize_operator(self.kernel, self.image_shape)
