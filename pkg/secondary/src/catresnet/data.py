"""File formats and on-the-fly degradation.

Readers for the deconvolution toolkit's interchange formats (binary PGM
images, text kernels) plus the circular-boundary blur used to synthesize
training pairs. Nothing here imports the toolkit; the formats are the
contract.
"""

from __future__ import annotations

import numpy as np
import torch
import torch.nn.functional as F

KERNEL_SUM_TOL = 1e-6


def _read_pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    # Header tokens are whitespace-separated; '#' starts a comment to EOL.
    tokens = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(data):
            raise ValueError("truncated PGM header")
        ch = data[pos : pos + 1]
        if ch == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
        elif ch.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos : pos + 1].isspace():
                pos += 1
            tokens.append(data[start:pos])
    return tokens, pos + 1  # past the single whitespace ending the header


def read_pgm(path: str) -> np.ndarray:
    """Binary PGM to float64 in [0, 1]; 16-bit samples are big-endian."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, offset = _read_pgm_tokens(data, 4)
    if tokens[0] != b"P5":
        raise ValueError(f"not a binary PGM: magic {tokens[0]!r}")
    width, height, maxval = (int(t) for t in tokens[1:])
    if maxval not in (255, 65535):
        raise ValueError(f"unsupported PGM maxval {maxval}")
    dtype = np.dtype(">u2") if maxval == 65535 else np.uint8
    raw = np.frombuffer(data, dtype=dtype, count=height * width, offset=offset)
    if raw.size != height * width:
        raise ValueError("truncated PGM pixel data")
    return raw.reshape(height, width).astype(np.float64) / maxval


def save_pgm(pixels: np.ndarray, path: str) -> None:
    """16-bit big-endian PGM; values are clipped to [0, 1]."""
    clipped = np.clip(np.asarray(pixels, dtype=np.float64), 0.0, 1.0)
    quantized = np.round(clipped * 65535.0).astype(">u2")
    height, width = quantized.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n65535\n".encode("ascii"))
        fh.write(quantized.tobytes())


def read_kernel_text(path: str) -> np.ndarray:
    """'rows cols' header then row-major taps; nonnegative, sum within 1e-6
    of one, renormalized exactly to one."""
    with open(path, "r", encoding="ascii") as fh:
        values = fh.read().split()
    if len(values) < 2:
        raise ValueError("kernel file too short")
    rows, cols = int(values[0]), int(values[1])
    taps = np.array([float(v) for v in values[2:]], dtype=np.float64)
    if taps.size != rows * cols:
        raise ValueError(f"expected {rows * cols} taps, got {taps.size}")
    taps = taps.reshape(rows, cols)
    if taps.min() < 0.0:
        raise ValueError(f"kernel taps must be nonnegative, min {taps.min()}")
    total = taps.sum()
    if abs(total - 1.0) > KERNEL_SUM_TOL:
        raise ValueError(f"kernel sum {total} outside 1 +/- {KERNEL_SUM_TOL}")
    return taps / total


def kernel_to_weight(kernel: np.ndarray, dtype=torch.float32) -> torch.Tensor:
    """Conv weight realizing true convolution (conv2d correlates, so flip)."""
    flipped = np.ascontiguousarray(kernel[::-1, ::-1])
    return torch.from_numpy(flipped).to(dtype).reshape(1, 1, *kernel.shape)


def blur_circular(images: torch.Tensor, weight: torch.Tensor) -> torch.Tensor:
    """Blur a (B, 1, H, W) batch with circular boundary handling."""
    kh, kw = weight.shape[-2:]
    padded = F.pad(images, (kw // 2, kw // 2, kh // 2, kh // 2), mode="circular")
    return F.conv2d(padded, weight)


def sample_patches(
    images: list[np.ndarray], patch: int, batch: int, rng: np.random.Generator
) -> torch.Tensor:
    if not images:
        raise ValueError("need at least one clear image")
    for img in images:
        if min(img.shape) < patch:
            raise ValueError(f"image {img.shape} smaller than patch size {patch}")
    out = np.empty((batch, 1, patch, patch), dtype=np.float32)
    for i in range(batch):
        img = images[rng.integers(len(images))]
        top = rng.integers(img.shape[0] - patch + 1)
        left = rng.integers(img.shape[1] - patch + 1)
        out[i, 0] = img[top : top + patch, left : left + patch]
    return torch.from_numpy(out)
