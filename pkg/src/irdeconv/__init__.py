"""Non-blind image deconvolution via an iterative residual series.

The core solver unrolls the matrix-inverse term of the MMSE restoration
filter into a truncated operator series, so each pass is one pair of
circular convolutions. Classical Wiener filtering plus ADMM and
accelerated-proximal-gradient L1 baselines are included for comparison,
along with degradation tooling, kernel synthesis, and quality metrics.
"""

from .baselines import (
    AdmmConfig,
    ApgConfig,
    SolverResult,
    admm_l1,
    apg_l1,
    soft_shrink,
)
from .degrade import (
    DegradeConfig,
    KernelGenConfig,
    degrade,
    gen_disk_kernel,
    gen_gaussian_kernel,
    gen_trajectory_kernel,
    generate_kernel,
)
from .image import Image, Kernel, PriorPatch, flip_kernel, rgb_to_luma
from .io import (
    load_image,
    load_kernel_text,
    save_image,
    save_kernel_text,
)
from .ird import (
    IrdAutoResult,
    IrdConfig,
    IrdTrace,
    export_trace,
    ird_auto_n,
    ird_deconvolve,
    ird_series_term,
)
from .metrics import (
    LossReport,
    QualityReport,
    content_loss,
    edge_loss,
    evaluate_quality,
    psnr,
    ssim,
    total_loss,
)
from .operator import (
    ConvergenceReport,
    LinearBlurOperator,
    apply_adjoint,
    convergence_factors,
    convolve_circular,
    materialize_operator,
    transfer_function,
)
from .wiener import MmseConfig, mmse_solve_dense, wiener_solve

__version__ = "0.1.0"

__all__ = [
    "AdmmConfig",
    "ApgConfig",
    "ConvergenceReport",
    "DegradeConfig",
    "Image",
    "IrdAutoResult",
    "IrdConfig",
    "IrdTrace",
    "Kernel",
    "KernelGenConfig",
    "LinearBlurOperator",
    "LossReport",
    "MmseConfig",
    "PriorPatch",
    "QualityReport",
    "SolverResult",
    "admm_l1",
    "apg_l1",
    "apply_adjoint",
    "content_loss",
    "convergence_factors",
    "convolve_circular",
    "degrade",
    "edge_loss",
    "evaluate_quality",
    "export_trace",
    "flip_kernel",
    "gen_disk_kernel",
    "gen_gaussian_kernel",
    "gen_trajectory_kernel",
    "generate_kernel",
    "ird_auto_n",
    "ird_deconvolve",
    "ird_series_term",
    "load_image",
    "load_kernel_text",
    "materialize_operator",
    "mmse_solve_dense",
    "psnr",
    "rgb_to_luma",
    "save_image",
    "save_kernel_text",
    "soft_shrink",
    "ssim",
    "total_loss",
    "transfer_function",
    "wiener_solve",
    "__version__",
]
