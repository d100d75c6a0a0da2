"""Training loop.

Patches are cropped from the clear images and degraded on the fly with a
fixed kernel (plus optional Gaussian noise), so the network never sees the
same pair twice. Adam with a stepped learning-rate decay; loss and PSNR
against the blurry input are logged on a fixed cadence.

Run directly for a from-files session:

    python3 -m catresnet.train --images a.pgm b.pgm --kernel k.txt --out run/
"""

from __future__ import annotations

import argparse
import csv
import os
from dataclasses import dataclass, field

import numpy as np
import torch

from .data import blur_circular, kernel_to_weight, read_kernel_text, read_pgm, sample_patches
from .losses import DEFAULT_ALPHA, DEFAULT_GAMMA, psnr, total_loss
from .model import CatResNet, NetSpec, build_network


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 2000
    learning_rate: float = 1e-4
    decay: float = 0.8
    decay_every: int = 1000
    batch: int = 4
    patch: int = 35
    alpha: float = DEFAULT_ALPHA
    gamma: float = DEFAULT_GAMMA
    noise_sigma: float = 0.0
    seed: int = 0
    log_every: int = 50

    def __post_init__(self):
        if self.steps < 1 or self.batch < 1 or self.patch < 1 or self.log_every < 1:
            raise ValueError("steps, batch, patch, and log_every must be positive")
        if self.learning_rate <= 0.0 or not 0.0 < self.decay <= 1.0 or self.decay_every < 1:
            raise ValueError("bad learning-rate schedule")
        if self.noise_sigma < 0.0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")


@dataclass
class LogRow:
    step: int
    learning_rate: float
    total: float
    content: float
    edge: float
    psnr_restored: float
    psnr_blurry: float


@dataclass
class TrainResult:
    log: list[LogRow] = field(default_factory=list)
    final_total: float = float("nan")


def train_toy(
    net: CatResNet,
    clear_images: list[np.ndarray],
    kernel: np.ndarray,
    cfg: TrainConfig,
) -> TrainResult:
    if not clear_images:
        raise ValueError("need at least one clear image")
    crop_rng = np.random.default_rng(cfg.seed)
    noise_gen = torch.Generator().manual_seed(cfg.seed)
    weight = kernel_to_weight(kernel, dtype=next(net.parameters()).dtype)
    optimizer = torch.optim.Adam(net.parameters(), lr=cfg.learning_rate)
    scheduler = torch.optim.lr_scheduler.StepLR(
        optimizer, step_size=cfg.decay_every, gamma=cfg.decay
    )
    result = TrainResult()
    for step in range(1, cfg.steps + 1):
        x = sample_patches(clear_images, cfg.patch, cfg.batch, crop_rng)
        b = blur_circular(x, weight)
        if cfg.noise_sigma > 0.0:
            b = b + cfg.noise_sigma * torch.randn(b.shape, generator=noise_gen)
        out = net(b)
        total, content, edge = total_loss(out, x, cfg.alpha, cfg.gamma)
        optimizer.zero_grad()
        total.backward()
        optimizer.step()
        scheduler.step()
        result.final_total = float(total.detach())
        if step == 1 or step % cfg.log_every == 0:
            result.log.append(
                LogRow(
                    step=step,
                    learning_rate=float(optimizer.param_groups[0]["lr"]),
                    total=result.final_total,
                    content=float(content.detach()),
                    edge=float(edge.detach()),
                    psnr_restored=psnr(out, x),
                    psnr_blurry=psnr(b, x),
                )
            )
    return result


def write_log_csv(log: list[LogRow], path: str) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["step", "learning_rate", "total", "content", "edge", "psnr_restored", "psnr_blurry"]
        )
        for row in log:
            writer.writerow(
                [row.step, repr(row.learning_rate), repr(row.total), repr(row.content),
                 repr(row.edge), f"{row.psnr_restored:.6f}", f"{row.psnr_blurry:.6f}"]
            )


def save_checkpoint(net: CatResNet, path: str) -> None:
    torch.save(net.state_dict(), path)


def load_checkpoint(net: CatResNet, path: str) -> None:
    net.load_state_dict(torch.load(path, weights_only=True))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Train the toy restorer on PGM images.")
    parser.add_argument("--images", nargs="+", required=True)
    parser.add_argument("--kernel", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--steps", type=int, default=2000)
    parser.add_argument("--batch", type=int, default=4)
    parser.add_argument("--noise-sigma", type=float, default=0.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--channels", type=int, default=10)
    parser.add_argument("--units", type=int, default=10)
    args = parser.parse_args(argv)

    images = [read_pgm(p) for p in args.images]
    kernel = read_kernel_text(args.kernel)
    spec = NetSpec(channels=args.channels, n_units=args.units)
    net = build_network(spec, seed=args.seed)
    cfg = TrainConfig(
        steps=args.steps, batch=args.batch, noise_sigma=args.noise_sigma, seed=args.seed
    )
    result = train_toy(net, images, kernel, cfg)
    os.makedirs(args.out, exist_ok=True)
    write_log_csv(result.log, os.path.join(args.out, "train_log.csv"))
    save_checkpoint(net, os.path.join(args.out, "checkpoint.pt"))
    print(f"final total loss {result.final_total:.6g} over {cfg.steps} steps")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
