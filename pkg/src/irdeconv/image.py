"""Core value types: grayscale images, blur kernels, and prior patches.

Intensities are 64-bit floats, nominally in [0, 1]. Values outside [0, 1]
are allowed mid-pipeline (residues oscillate around zero); clamping happens
only when an image is quantized for disk output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Image",
    "Kernel",
    "PriorPatch",
    "flip_kernel",
    "rgb_to_luma",
]

# ITU-R BT.601 luma weights.
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

KERNEL_SUM_TOL = 1e-12


def _as_float2d(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{what} must be a 2-D array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{what} must have at least one row and column")
    return arr


@dataclass(frozen=True)
class Image:
    """A 2-D grayscale intensity field. Immutable after construction."""

    pixels: np.ndarray

    def __post_init__(self):
        px = _as_float2d(self.pixels, "image").copy()
        if not np.all(np.isfinite(px)):
            raise ValueError("image contains non-finite pixel values")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape


@dataclass(frozen=True)
class Kernel:
    """A normalized blur kernel: odd dimensions, nonnegative taps, sum 1."""

    taps: np.ndarray

    def __post_init__(self):
        taps = _as_float2d(self.taps, "kernel").copy()
        if taps.shape[0] % 2 == 0 or taps.shape[1] % 2 == 0:
            raise ValueError(f"kernel dimensions must be odd, got {taps.shape}")
        if not np.all(np.isfinite(taps)):
            raise ValueError("kernel contains non-finite taps")
        if taps.min() < 0.0:
            raise ValueError("kernel taps must be nonnegative")
        total = taps.sum()
        if abs(total - 1.0) > KERNEL_SUM_TOL:
            raise ValueError(f"kernel taps must sum to 1 (got {total!r})")
        taps.flags.writeable = False
        object.__setattr__(self, "taps", taps)

    @property
    def size_h(self) -> int:
        return self.taps.shape[0]

    @property
    def size_w(self) -> int:
        return self.taps.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.taps.shape

    @classmethod
    def delta(cls, size: int = 1) -> "Kernel":
        """Identity kernel: single unit tap at the center of a size x size grid."""
        if size % 2 == 0:
            raise ValueError("delta kernel size must be odd")
        taps = np.zeros((size, size))
        taps[size // 2, size // 2] = 1.0
        return cls(taps)


@dataclass(frozen=True)
class PriorPatch:
    """A centrally symmetric correlation patch acting as the image prior.

    Symmetry (tap[i, j] == tap[-i, -j] about the center) makes the induced
    circulant operator symmetric, so its transfer function is real; the
    constructor additionally checks that the transfer function is nonnegative
    on an oversampled frequency grid, keeping the operator positive
    semidefinite. The default patch is the 1x1 delta (identity prior).
    """

    taps: np.ndarray

    def __post_init__(self):
        taps = _as_float2d(self.taps, "prior patch").copy()
        if taps.shape[0] % 2 == 0 or taps.shape[1] % 2 == 0:
            raise ValueError(f"prior patch dimensions must be odd, got {taps.shape}")
        if not np.all(np.isfinite(taps)):
            raise ValueError("prior patch contains non-finite taps")
        if not np.array_equal(taps, np.rot90(taps, 2)):
            raise ValueError("prior patch must be centrally symmetric")
        _check_nonnegative_transfer(taps)
        taps.flags.writeable = False
        object.__setattr__(self, "taps", taps)

    @property
    def size_h(self) -> int:
        return self.taps.shape[0]

    @property
    def size_w(self) -> int:
        return self.taps.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.taps.shape

    @classmethod
    def delta(cls) -> "PriorPatch":
        return cls(np.ones((1, 1)))


def _check_nonnegative_transfer(taps: np.ndarray) -> None:
    # Evaluate the patch's transfer function on a frequency grid several
    # times denser than the patch itself; symmetry makes it real, and it
    # must stay nonnegative for the prior operator to be PSD.
    shape = (max(32, 4 * taps.shape[0]), max(32, 4 * taps.shape[1]))
    padded = np.zeros(shape)
    padded[: taps.shape[0], : taps.shape[1]] = taps
    padded = np.roll(padded, (-(taps.shape[0] // 2), -(taps.shape[1] // 2)), axis=(0, 1))
    transfer = np.fft.fft2(padded)
    if transfer.real.min() < -1e-10:
        raise ValueError("prior patch transfer function must be nonnegative")


def flip_kernel(k: Kernel) -> Kernel:
    """Rotate the kernel 180 degrees; realizes the adjoint blur operator."""
    return Kernel(np.rot90(k.taps, 2))


def rgb_to_luma(rgb) -> Image:
    """Convert an (H, W, 3) RGB array in [0, 1] to its luma channel (BT.601)."""
    arr = np.asarray(rgb, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) RGB array, got shape {arr.shape}")
    return Image(arr @ _LUMA_WEIGHTS)
