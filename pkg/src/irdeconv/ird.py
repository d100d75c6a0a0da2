"""Iterative residual deconvolution: truncated-series evaluation of the MMSE solve.

Each pass damps the running residue and subtracts its blur-reblur correlation:

    r <- sigma' r - k * f_x * k_flip * r        (sigma' = 1 - sigma)
    s <- s + r

and the restored image is f_x * k_flip * s. In the frequency domain one pass
multiplies the residue by (sigma' - |k_hat|^2 c_hat), so the iterate sums the
geometric series of the closed-form solution and converges to the Wiener
restoration at rate rho_max (see `operator.convergence_factors`).
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .image import Image, Kernel, PriorPatch
from .io import save_image
from .operator import transfer_function

__all__ = [
    "IrdConfig",
    "IrdTrace",
    "IrdAutoResult",
    "ird_deconvolve",
    "ird_series_term",
    "ird_auto_n",
    "export_trace",
    "AUTO_N_CAP",
]

AUTO_N_CAP = 100_000


@dataclass(frozen=True)
class IrdConfig:
    """Solver knobs: damping sigma in (0, 1), iteration count, prior, tracing."""

    sigma: float = 0.01
    n_iters: int = 100
    f_x: PriorPatch = field(default_factory=PriorPatch.delta)
    trace_every: int = 0

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError(f"sigma must lie in (0, 1), got {self.sigma}")
        if self.n_iters < 0:
            raise ValueError(f"n_iters must be nonnegative, got {self.n_iters}")
        if self.trace_every < 0:
            raise ValueError(f"trace_every must be nonnegative, got {self.trace_every}")


@dataclass
class IrdTrace:
    """Residue history of one solve.

    `energies[n]` is ||r_n||_2 for every n = 0..N; residue images and partial
    outputs are stored only at multiples of `trace_every` to keep long runs
    affordable (empty when trace_every = 0).
    """

    energies: np.ndarray
    residues: list[tuple[int, Image, float]]
    partial_outputs: list[tuple[int, Image]]


class _SpectralLoop:
    """Shared state for one solve: cached transfer functions and FFT buffers."""

    def __init__(self, b: Image, k: Kernel, f_x: PriorPatch, sigma: float):
        k_hat = transfer_function(k, b.shape)
        c_hat = transfer_function(f_x, b.shape).real
        self.step = (1.0 - sigma) - np.abs(k_hat) ** 2 * c_hat  # real multiplier
        self.correlate = c_hat * np.conj(k_hat)  # final f_x * k_flip projection
        self.b = b

    def advance(self, r: np.ndarray) -> np.ndarray:
        return np.fft.ifft2(np.fft.fft2(r) * self.step).real

    def project(self, s: np.ndarray) -> np.ndarray:
        return np.fft.ifft2(np.fft.fft2(s) * self.correlate).real


def ird_deconvolve(b: Image, k: Kernel, cfg: IrdConfig) -> tuple[Image, IrdTrace]:
    """Run the residual iteration for cfg.n_iters passes and project the sum."""
    loop = _SpectralLoop(b, k, cfg.f_x, cfg.sigma)
    r = b.pixels.copy()
    s = b.pixels.copy()
    energies = np.empty(cfg.n_iters + 1)
    energies[0] = np.linalg.norm(r)
    residues: list[tuple[int, Image, float]] = []
    partials: list[tuple[int, Image]] = []

    def record(n: int, r_now: np.ndarray, s_now: np.ndarray) -> None:
        if cfg.trace_every and n % cfg.trace_every == 0:
            residues.append((n, Image(r_now), float(np.linalg.norm(r_now))))
            partials.append((n, Image(loop.project(s_now))))

    record(0, r, s)
    for n in range(1, cfg.n_iters + 1):
        r = loop.advance(r)
        s += r
        energies[n] = np.linalg.norm(r)
        record(n, r, s)
    x_hat = Image(loop.project(s))
    return x_hat, IrdTrace(energies, residues, partials)


def ird_series_term(b: Image, k: Kernel, f_x: PriorPatch, sigma: float, n: int) -> Image:
    """The n-th unfolded component f_x * k_flip * r_n; their sum over n = 0..N
    equals the N-iteration solve output."""
    if n < 0:
        raise ValueError(f"series index must be nonnegative, got {n}")
    if not 0.0 < sigma < 1.0:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    loop = _SpectralLoop(b, k, f_x, sigma)
    term_hat = np.fft.fft2(b.pixels) * loop.step**n * loop.correlate
    return Image(np.fft.ifft2(term_hat).real)


@dataclass(frozen=True)
class IrdAutoResult:
    x_hat: Image
    n_used: int
    converged: bool


def ird_auto_n(b: Image, k: Kernel, cfg: IrdConfig, rel_tol: float) -> IrdAutoResult:
    """Iterate until ||r_n|| <= rel_tol * ||b|| (hard cap 1e5 passes).

    cfg.n_iters is ignored; the stopping rule decides. A result is returned
    even when the cap is hit, flagged via `converged`.
    """
    if not rel_tol > 0.0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")
    loop = _SpectralLoop(b, k, cfg.f_x, cfg.sigma)
    r = b.pixels.copy()
    s = b.pixels.copy()
    threshold = rel_tol * np.linalg.norm(b.pixels)
    n_used = 0
    converged = np.linalg.norm(r) <= threshold
    while not converged and n_used < AUTO_N_CAP:
        r = loop.advance(r)
        s += r
        n_used += 1
        converged = np.linalg.norm(r) <= threshold
    return IrdAutoResult(Image(loop.project(s)), n_used, bool(converged))


def export_trace(trace: IrdTrace, out_dir: str) -> None:
    """Write traced residues as numbered PGMs (rescaled to max 1) plus an
    'n,residue_energy' CSV covering every iteration."""
    os.makedirs(out_dir, exist_ok=True)
    for n, residue, _energy in trace.residues:
        pixels = residue.pixels
        peak = pixels.max()
        if peak > 0.0:
            pixels = pixels / peak
        save_image(Image(pixels), os.path.join(out_dir, f"residue_{n:05d}.pgm"))
    with open(os.path.join(out_dir, "residue_energy.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "residue_energy"])
        for n, energy in enumerate(trace.energies):
            writer.writerow([n, f"{energy:.17g}"])
