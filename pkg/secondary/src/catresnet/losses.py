"""Training losses: smooth-L1 content term plus a squared gradient-difference
edge term, combined as alpha * content + gamma * edge. Semantics mirror the
deconvolution toolkit's metrics so values cross-check file for file."""

from __future__ import annotations

import math

import torch
import torch.nn.functional as F

DEFAULT_ALPHA = 5000.0
DEFAULT_GAMMA = 100.0


def content_loss(x_hat: torch.Tensor, x: torch.Tensor) -> torch.Tensor:
    # beta = 1 puts the quadratic-to-linear transition at |d| = 1.
    return F.smooth_l1_loss(x_hat, x, beta=1.0)


def _gradients(arr: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
    dh = torch.roll(arr, -1, dims=-1) - arr
    dv = torch.roll(arr, -1, dims=-2) - arr
    return dh, dv


def edge_loss(x_hat: torch.Tensor, x: torch.Tensor) -> torch.Tensor:
    """Mean squared difference of circular forward-difference gradients."""
    dh_hat, dv_hat = _gradients(x_hat)
    dh, dv = _gradients(x)
    return ((dh_hat - dh) ** 2).mean() + ((dv_hat - dv) ** 2).mean()


def total_loss(
    x_hat: torch.Tensor,
    x: torch.Tensor,
    alpha: float = DEFAULT_ALPHA,
    gamma: float = DEFAULT_GAMMA,
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """(total, content, edge) with total = alpha * content + gamma * edge."""
    if alpha < 0.0 or gamma < 0.0:
        raise ValueError(f"loss weights must be nonnegative, got {alpha}, {gamma}")
    content = content_loss(x_hat, x)
    edge = edge_loss(x_hat, x)
    return alpha * content + gamma * edge, content, edge


def psnr(x_hat: torch.Tensor, x: torch.Tensor) -> float:
    """10 log10(1 / MSE) with peak 1; +inf for identical inputs."""
    mse = float(((x_hat.detach().double() - x.detach().double()) ** 2).mean())
    return math.inf if mse == 0.0 else 10.0 * math.log10(1.0 / mse)
