"""Network definition.

The restorer has three stages: a 1x1 convolution expanding the single input
channel to C feature channels, a chain of N residual units each computing
x - deconv(PReLU(conv(x))), and an integration head that concatenates the raw
input with every unit's output (N*C + 1 channels) and reduces the stack back
to one channel through three convolutions with decreasing widths.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import torch
from torch import nn

from .data import save_pgm


@dataclass(frozen=True)
class NetSpec:
    channels: int = 10
    n_units: int = 10
    ru_kernel_size: int = 7
    iu_kernel_size: int = 7
    iu_layers: int = 3

    def __post_init__(self):
        if self.channels < 1 or self.n_units < 1:
            raise ValueError(
                f"channels and n_units must be positive, got {self.channels}, {self.n_units}"
            )
        for name in ("ru_kernel_size", "iu_kernel_size"):
            k = getattr(self, name)
            if k < 1 or k % 2 == 0:
                raise ValueError(f"{name} must be odd and positive, got {k}")
        # The head shape is fixed; the widths below assume exactly three layers.
        if self.iu_layers != 3:
            raise ValueError(f"iu_layers is fixed at 3, got {self.iu_layers}")

    @property
    def concat_width(self) -> int:
        return self.n_units * self.channels + 1

    def head_widths(self) -> tuple[int, int, int, int]:
        w = self.concat_width
        return (w, math.ceil(w / 3), math.ceil(w / 9), 1)


class ResidualUnit(nn.Module):
    """x - deconv(PReLU(conv(x))), spatial shape preserved."""

    def __init__(self, channels: int, kernel_size: int):
        super().__init__()
        pad = kernel_size // 2
        self.conv = nn.Conv2d(channels, channels, kernel_size, padding=pad)
        self.act = nn.PReLU(channels)
        self.deconv = nn.ConvTranspose2d(channels, channels, kernel_size, padding=pad)

    def forward(self, x):
        return x - self.deconv(self.act(self.conv(x)))


class CatResNet(nn.Module):
    def __init__(self, spec: NetSpec):
        super().__init__()
        self.spec = spec
        self.expand = nn.Conv2d(1, spec.channels, kernel_size=1)
        self.units = nn.ModuleList(
            ResidualUnit(spec.channels, spec.ru_kernel_size) for _ in range(spec.n_units)
        )
        widths = spec.head_widths()
        pad = spec.iu_kernel_size // 2
        self.head = nn.Sequential(
            nn.Conv2d(widths[0], widths[1], spec.iu_kernel_size, padding=pad),
            nn.PReLU(widths[1]),
            nn.Conv2d(widths[1], widths[2], spec.iu_kernel_size, padding=pad),
            nn.PReLU(widths[2]),
            nn.Conv2d(widths[2], widths[3], spec.iu_kernel_size, padding=pad),
        )

    def forward_with_intermediates(self, b):
        feat = self.expand(b)
        inters = []
        h = feat
        for unit in self.units:
            h = unit(h)
            inters.append(h)
        stacked = torch.cat([b] + inters, dim=1)
        return self.head(stacked), inters

    def forward(self, b):
        out, _ = self.forward_with_intermediates(b)
        return out


def build_network(spec: NetSpec | None = None, seed: int = 0) -> CatResNet:
    """Construct a seeded network; equal (spec, seed) gives identical weights."""
    spec = NetSpec() if spec is None else spec
    torch.manual_seed(seed)
    return CatResNet(spec)


def count_parameters(net: nn.Module) -> int:
    return sum(p.numel() for p in net.parameters())


def run_network(net: CatResNet, image: torch.Tensor) -> torch.Tensor:
    """Restore one single-channel 2-D image; shape is preserved."""
    if image.dim() != 2:
        raise ValueError(f"expected a single-channel 2-D image, got shape {tuple(image.shape)}")
    h, w = image.shape
    k = max(net.spec.ru_kernel_size, net.spec.iu_kernel_size)
    if min(h, w) < k:
        raise ValueError(f"image {h}x{w} is smaller than the {k}x{k} kernels")
    with torch.no_grad():
        out = net(image.reshape(1, 1, h, w).to(next(net.parameters()).dtype))
    return out.reshape(h, w)


def export_intermediates(net: CatResNet, image: torch.Tensor, out_dir: str | None = None):
    """Channel means of every unit's output, rescaled to peak 1; one array per
    unit, optionally also written as numbered PGM files."""
    if image.dim() != 2:
        raise ValueError(f"expected a single-channel 2-D image, got shape {tuple(image.shape)}")
    h, w = image.shape
    with torch.no_grad():
        batch = image.reshape(1, 1, h, w).to(next(net.parameters()).dtype)
        _, inters = net.forward_with_intermediates(batch)
    images = []
    for inter in inters:
        mean = inter[0].mean(dim=0).numpy().copy()
        peak = mean.max()
        if peak > 0.0:
            mean /= peak
        images.append(mean)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for i, arr in enumerate(images, start=1):
            save_pgm(arr, os.path.join(out_dir, f"inter_{i:03d}.pgm"))
    return images
