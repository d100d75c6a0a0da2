"""Command-line front end.

Subcommands: degrade, deconv, eval, oracle-check, kernel-gen, make-testset,
trace. Every command that writes files drops a plain-text key=value manifest
next to them (exactly one per output directory) echoing the full
configuration, so reruns are reproducible and diffable.

Exit codes: 0 success, 1 bad arguments or invalid inputs, 2 I/O failure,
3 oracle tolerance breach.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .baselines import AdmmConfig, ApgConfig, admm_l1, apg_l1
from .degrade import (
    NOISE_RNG_ALGORITHM,
    DegradeConfig,
    KernelGenConfig,
    degrade,
    generate_kernel,
)
from .image import Image, PriorPatch
from .io import (
    load_image,
    load_kernel_text,
    load_patch_text,
    save_image,
    save_kernel_text,
)
from .ird import IrdConfig, export_trace, ird_deconvolve
from .metrics import evaluate_quality, total_loss
from .operator import convergence_factors, convolve_circular, materialize_operator
from .wiener import MmseConfig, mmse_solve_dense, wiener_solve

ORACLE_TOL = 1e-6
_ORACLE_SIZES = (6, 8, 11, 13, 16)
_ORACLE_TAIL_TOL = 1e-8
_ORACLE_MAX_PASSES = 50_000


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on bad usage; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    return str(value)


def _write_manifest(out_dir: str, command: str, args, extra: dict | None = None) -> None:
    entries = {"command": command, "toolkit_version": __version__}
    echo = {k: v for k, v in vars(args).items() if k not in ("func", "command")}
    for key in sorted(echo):
        entries[key] = echo[key]
    if extra:
        entries.update(extra)
    lines = [f"{key}={_fmt_value(value)}" for key, value in entries.items()]
    with open(os.path.join(out_dir, "manifest.txt"), "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _save_restored(image: Image, out_dir: str, stem: str) -> None:
    # PGM for eyeballing, NPY so downstream comparisons dodge quantization.
    save_image(image, os.path.join(out_dir, f"{stem}.pgm"))
    save_image(image, os.path.join(out_dir, f"{stem}.npy"))


def cmd_degrade(args) -> int:
    x = load_image(args.image)
    k = load_kernel_text(args.kernel)
    b = degrade(x, k, DegradeConfig(noise_sigma=args.noise_sigma, seed=args.seed))
    os.makedirs(args.out, exist_ok=True)
    _save_restored(b, args.out, "degraded")
    _write_manifest(args.out, "degrade", args, {"rng_algorithm": NOISE_RNG_ALGORITHM})
    return 0


def _load_prior(path: str | None) -> PriorPatch:
    return PriorPatch.delta() if path is None else load_patch_text(path)


def cmd_deconv(args) -> int:
    b = load_image(args.image)
    k = load_kernel_text(args.kernel)
    f_x = _load_prior(args.fx)
    extra: dict = {"converged": True}
    if args.method == "wiener":
        x_hat = wiener_solve(b, k, MmseConfig(sigma=args.sigma, f_x=f_x))
    elif args.method == "ird":
        iters = 100 if args.iters is None else args.iters
        trace_every = args.trace_every if args.trace_dir else 0
        cfg = IrdConfig(sigma=args.sigma, n_iters=iters, f_x=f_x, trace_every=trace_every)
        x_hat, trace = ird_deconvolve(b, k, cfg)
        extra["residue_energy_final"] = float(trace.energies[-1])
        if args.trace_dir:
            export_trace(trace, args.trace_dir)
    else:
        iters = 1000 if args.iters is None else args.iters
        if args.method == "admm":
            result = admm_l1(b, k, AdmmConfig(args.lam, args.rho, iters, args.tol))
        else:
            cfg = ApgConfig(args.lam, args.step, iters, args.tol, args.scale_step_by_lam)
            result = apg_l1(b, k, cfg)
        x_hat = result.x_hat
        extra["converged"] = result.converged
        extra["iterations_used"] = result.iterations_used
        extra["final_objective"] = result.objective_history[-1]
    os.makedirs(args.out, exist_ok=True)
    _save_restored(x_hat, args.out, "restored")
    _write_manifest(args.out, "deconv", args, extra)
    if args.trace_dir and os.path.abspath(args.trace_dir) != os.path.abspath(args.out):
        _write_manifest(args.trace_dir, "deconv", args, extra)
    return 0


def cmd_eval(args) -> int:
    restored = load_image(args.restored)
    reference = load_image(args.reference)
    quality = evaluate_quality(restored, reference)
    psnr_text = "inf" if math.isinf(quality.psnr_db) else f"{quality.psnr_db:.6f}"
    fields = [psnr_text, repr(quality.ssim)]
    if args.loss:
        report = total_loss(restored, reference)
        fields += [repr(report.content), repr(report.edge), repr(report.total)]
    print(",".join(fields))
    return 0


def _rel_l2(diff: np.ndarray, reference: np.ndarray) -> float:
    scale = np.linalg.norm(reference)
    norm = np.linalg.norm(diff)
    return float(norm / scale) if scale > 0.0 else float(norm)


def _tail_passes(rho: float, tol: float) -> int:
    """Smallest N with rho^(N+1)/(1-rho) <= tol (capped; rho >= 1 hits the cap)."""
    if rho <= 0.0:
        return 1
    if rho >= 1.0:
        return _ORACLE_MAX_PASSES
    n = math.ceil(math.log(tol * (1.0 - rho)) / math.log(rho)) - 1
    return min(max(n, 1), _ORACLE_MAX_PASSES)


def cmd_oracle_check(args) -> int:
    k = load_kernel_text(args.kernel)
    f_x = PriorPatch.delta()
    mmse_cfg = MmseConfig(sigma=args.sigma, f_x=f_x)
    floor = max(k.size_h, k.size_w)
    sizes = sorted({max(s, floor) for s in _ORACLE_SIZES})
    err_materialize = err_wiener_dense = err_ird_wiener = 0.0
    for trial in range(args.trials):
        rng = np.random.default_rng(1000 + trial)
        size = sizes[trial % len(sizes)]
        x = Image(rng.uniform(size=(size, size)))
        blurred = convolve_circular(x, k)
        dense = materialize_operator(k, x.shape)
        via_dense = (dense @ x.pixels.ravel()).reshape(x.shape)
        err_materialize = max(
            err_materialize, _rel_l2(via_dense - blurred.pixels, blurred.pixels)
        )
        w = wiener_solve(blurred, k, mmse_cfg)
        d = mmse_solve_dense(blurred, k, mmse_cfg)
        err_wiener_dense = max(err_wiener_dense, _rel_l2(w.pixels - d.pixels, d.pixels))
        rho = convergence_factors(k, f_x, args.sigma, x.shape).rho_max
        n = _tail_passes(rho, _ORACLE_TAIL_TOL)
        ird_x, _ = ird_deconvolve(blurred, k, IrdConfig(sigma=args.sigma, n_iters=n))
        err_ird_wiener = max(err_ird_wiener, _rel_l2(ird_x.pixels - w.pixels, w.pixels))
    print(f"materialize_rel_error={err_materialize:.3e}")
    print(f"wiener_dense_rel_error={err_wiener_dense:.3e}")
    print(f"ird_wiener_rel_error={err_ird_wiener:.3e}")
    worst = max(err_materialize, err_wiener_dense, err_ird_wiener)
    if worst > ORACLE_TOL:
        print(f"error: oracle tolerance breach ({worst:.3e} > {ORACLE_TOL})", file=sys.stderr)
        return 3
    return 0


def cmd_kernel_gen(args) -> int:
    cfg = KernelGenConfig(size=args.size, seed=args.seed, family=args.family)
    k = generate_kernel(cfg)
    os.makedirs(args.out, exist_ok=True)
    save_kernel_text(k, os.path.join(args.out, "kernel.txt"))
    _write_manifest(args.out, "kernel-gen", args, {"actual_size": f"{k.size_h}x{k.size_w}"})
    return 0


def cmd_make_testset(args) -> int:
    os.makedirs(args.out, exist_ok=True)

    def build(idx: int, image_path: str) -> list:
        x = load_image(image_path)
        gen_cfg = KernelGenConfig(size=args.kernel_size, seed=args.seed + idx, family=args.family)
        k = generate_kernel(gen_cfg)
        b = degrade(x, k, DegradeConfig(args.noise_sigma, args.seed + 10_000 + idx))
        names = (f"x_{idx:03d}.pgm", f"k_{idx:03d}.txt", f"b_{idx:03d}.pgm")
        save_image(x, os.path.join(args.out, names[0]))
        save_kernel_text(k, os.path.join(args.out, names[1]))
        save_image(b, os.path.join(args.out, names[2]))
        return [idx, *names, image_path, gen_cfg.seed, args.seed + 10_000 + idx]

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(build, range(len(args.images)), args.images))
    else:
        rows = [build(i, p) for i, p in enumerate(args.images)]
    with open(os.path.join(args.out, "index.csv"), "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "clear", "kernel", "blurred", "source", "kernel_seed", "noise_seed"])
        writer.writerows(sorted(rows, key=lambda row: row[0]))
    _write_manifest(args.out, "make-testset", args, {"rng_algorithm": NOISE_RNG_ALGORITHM})
    return 0


def cmd_trace(args) -> int:
    b = load_image(args.image)
    k = load_kernel_text(args.kernel)
    cfg = IrdConfig(sigma=args.sigma, n_iters=args.iters, trace_every=args.every)
    x_hat, trace = ird_deconvolve(b, k, cfg)
    export_trace(trace, args.out)
    _save_restored(x_hat, args.out, "restored")
    _write_manifest(args.out, "trace", args, {"residue_energy_final": float(trace.energies[-1])})
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="irdeconv", description="Iterative residual deconvolution toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degrade", help="blur an image and add seeded Gaussian noise")
    p.add_argument("--image", required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("deconv", help="restore an image with a chosen solver")
    p.add_argument("--method", required=True, choices=("ird", "wiener", "admm", "apg"))
    p.add_argument("--image", required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sigma", type=float, default=0.01, help="ird/wiener damping")
    p.add_argument("--iters", type=int, default=None, help="ird passes or admm/apg cap")
    p.add_argument("--fx", default=None, help="prior correlation patch (text format)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.01)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.25)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--trace-dir", default=None)
    p.add_argument("--trace-every", type=int, default=1)
    p.add_argument("--scale-step-by-lam", action="store_true")
    p.set_defaults(func=cmd_deconv)

    p = sub.add_parser("eval", help="print psnr,ssim[,content,edge,total] as CSV")
    p.add_argument("--restored", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--loss", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle-check", help="run the dense-oracle equivalence suite")
    p.add_argument("--kernel", required=True)
    p.add_argument("--sigma", type=float, default=0.01)
    p.add_argument("--trials", type=int, default=10)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("kernel-gen", help="synthesize a blur kernel")
    p.add_argument("--family", choices=("trajectory", "disk", "gaussian"), default="trajectory")
    p.add_argument("--size", type=int, default=21)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_kernel_gen)

    p = sub.add_parser("make-testset", help="write b/k/x triples plus an index CSV")
    p.add_argument("--images", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kernel-size", type=int, default=21)
    p.add_argument("--family", choices=("trajectory", "disk", "gaussian"), default="trajectory")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_make_testset)

    p = sub.add_parser("trace", help="export residue images and energies of an ird run")
    p.add_argument("--image", required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--sigma", type=float, default=0.01)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--every", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_trace)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
