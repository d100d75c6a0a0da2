"""Shared fixtures for the network tests: a toy scene generator and direct
summation references for the layer types under test."""

import numpy as np
import torch

FIXTURES = __file__.rsplit("/", 1)[0] + "/fixtures"


def toy_scene(h: int, w: int, seed: int) -> np.ndarray:
    """Band-limited random texture in [0.05, 0.95] (float64)."""
    rng = np.random.default_rng(seed)
    spectrum = np.fft.fft2(rng.uniform(size=(h, w)))
    fu = np.minimum(np.arange(h), h - np.arange(h))[:, None]
    fv = np.minimum(np.arange(w), w - np.arange(w))[None, :]
    smooth = np.fft.ifft2(spectrum * ((fu <= h // 8) & (fv <= w // 8))).real
    low, high = smooth.min(), smooth.max()
    return 0.05 + 0.9 * (smooth - low) / (high - low)


def ref_conv2d(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Cross-correlation with zero padding, shapes (Ci,H,W) x (Co,Ci,k,k)."""
    co, ci, kh, kw = weight.shape
    _, h, w = x.shape
    ph, pw = kh // 2, kw // 2
    padded = np.zeros((ci, h + 2 * ph, w + 2 * pw))
    padded[:, ph : ph + h, pw : pw + w] = x
    out = np.zeros((co, h, w))
    for o in range(co):
        for c in range(ci):
            for u in range(kh):
                for v in range(kw):
                    out[o] += weight[o, c, u, v] * padded[c, u : u + h, v : v + w]
        out[o] += bias[o]
    return out


def ref_conv_transpose2d(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Transpose convolution, stride 1, shapes (Ci,H,W) x (Ci,Co,k,k); the
    padding argument crops k//2 from each output edge."""
    ci, co, kh, kw = weight.shape
    _, h, w = x.shape
    full = np.zeros((co, h + kh - 1, w + kw - 1))
    for c in range(ci):
        for o in range(co):
            for i in range(h):
                for j in range(w):
                    full[o, i : i + kh, j : j + kw] += x[c, i, j] * weight[c, o]
    ph, pw = kh // 2, kw // 2
    return full[:, ph : ph + h, pw : pw + w] + bias[:, None, None]


def ref_residual_unit(x: np.ndarray, unit) -> np.ndarray:
    """unit is a torch ResidualUnit; x is (C,H,W) float64."""
    conv_w = unit.conv.weight.detach().double().numpy()
    conv_b = unit.conv.bias.detach().double().numpy()
    slope = unit.act.weight.detach().double().numpy()[:, None, None]
    deconv_w = unit.deconv.weight.detach().double().numpy()
    deconv_b = unit.deconv.bias.detach().double().numpy()
    pre = ref_conv2d(x, conv_w, conv_b)
    act = np.where(pre >= 0.0, pre, slope * pre)
    return x - ref_conv_transpose2d(act, deconv_w, deconv_b)


def zero_residual_units(net) -> None:
    """Make every residual unit the identity by zeroing its deconv branch."""
    with torch.no_grad():
        for unit in net.units:
            unit.deconv.weight.zero_()
            unit.deconv.bias.zero_()


def zero_all_parameters(net) -> None:
    with torch.no_grad():
        for p in net.parameters():
            p.zero_()
