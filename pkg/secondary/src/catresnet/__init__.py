"""Toy unrolled deconvolution network: residual units, concatenation,
integration head."""

from .data import (
    KERNEL_SUM_TOL,
    blur_circular,
    kernel_to_weight,
    read_kernel_text,
    read_pgm,
    sample_patches,
    save_pgm,
)
from .losses import (
    DEFAULT_ALPHA,
    DEFAULT_GAMMA,
    content_loss,
    edge_loss,
    psnr,
    total_loss,
)
from .model import (
    CatResNet,
    NetSpec,
    ResidualUnit,
    build_network,
    count_parameters,
    export_intermediates,
    run_network,
)
from .train import (
    LogRow,
    TrainConfig,
    TrainResult,
    load_checkpoint,
    save_checkpoint,
    train_toy,
    write_log_csv,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_SUM_TOL",
    "DEFAULT_ALPHA",
    "DEFAULT_GAMMA",
    "CatResNet",
    "LogRow",
    "NetSpec",
    "ResidualUnit",
    "TrainConfig",
    "TrainResult",
    "blur_circular",
    "build_network",
    "content_loss",
    "count_parameters",
    "edge_loss",
    "export_intermediates",
    "kernel_to_weight",
    "load_checkpoint",
    "psnr",
    "read_kernel_text",
    "read_pgm",
    "run_network",
    "sample_patches",
    "save_checkpoint",
    "save_pgm",
    "total_loss",
    "train_toy",
    "write_log_csv",
]
