"""Cutoff-kernel selection from the SSIM-vs-kernel-size curve.

The sweep filters the image at increasing Gaussian kernel sizes and records
the structural similarity to the original. The cutoff minimizes a weighted
combination of the normalized integral, value, and derivative of that curve:
the integral penalizes oversized kernels, the value rewards having actually
removed structure, and the derivative steers the choice past the steep
knee where detail is still being destroyed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .core import ImageBuffer
from .errors import ParamError
from .filtering import BoundaryMode, GaussianSpec, estimate_illumination
from .metrics import SsimConstants, ssim

_MAX_SWEEP_SAMPLES = 48


@dataclass(frozen=True)
class SdifWeights:
    """Empirical weights on the integral, value, and derivative terms."""

    integral: float = 1.0
    value: float = 0.3
    derivative: float = 0.7

    def __post_init__(self):
        if min(self.integral, self.value, self.derivative) < 0:
            raise ParamError("SDIF weights must be nonnegative")
        if self.integral == self.value == self.derivative == 0:
            raise ParamError("at least one SDIF weight must be positive")


@dataclass(frozen=True)
class SsimCurve:
    """Sampled SSIM-vs-kernel curve with running sum and forward difference."""

    kernel_sizes: np.ndarray
    ssim: np.ndarray
    integral: np.ndarray
    derivative: np.ndarray  # forward difference per k-step, length n-1

    @property
    def stride(self) -> int:
        return int(self.kernel_sizes[1] - self.kernel_sizes[0])

    def is_degenerate(self) -> bool:
        return bool(np.ptp(self.ssim) < 1e-12)


@dataclass(frozen=True)
class CutoffSelection:
    k_cutoff: int
    objective: np.ndarray
    degenerate: bool = False


def default_sweep_range(shape: tuple[int, int]) -> tuple[int, int, int]:
    """(k_min, k_max, stride): 5 .. min(M,N)/4, at most 48 samples."""
    k_max = max(5, min(shape) // 4)
    if k_max % 2 == 0:
        k_max -= 1
    stride = 2
    while (k_max - 5) // stride + 1 > _MAX_SWEEP_SAMPLES:
        stride += 2
    return 5, k_max, stride


def _validate_sweep(img: ImageBuffer, k_min: int, k_max: int, stride: int) -> np.ndarray:
    if k_min < 3 or k_min % 2 == 0:
        raise ParamError(f"k_min must be odd and >= 3, got {k_min}")
    if k_max > min(img.height, img.width):
        raise ParamError(f"k_max {k_max} exceeds image extent {img.data.shape}")
    if stride < 2 or stride % 2 != 0:
        raise ParamError(f"stride must be even and positive, got {stride}")
    ks = np.arange(k_min, k_max + 1, stride, dtype=np.int64)
    if len(ks) < 1:
        raise ParamError(f"empty sweep: [{k_min}, {k_max}] stride {stride}")
    return ks


def _downsample2(data: np.ndarray) -> np.ndarray:
    h, w = data.shape
    h2, w2 = h - h % 2, w - w % 2
    d = data[:h2, :w2]
    return 0.25 * (d[0::2, 0::2] + d[1::2, 0::2] + d[0::2, 1::2] + d[1::2, 1::2])


def ssim_sweep(
    img: ImageBuffer,
    k_range: tuple[int, int] | None = None,
    stride: int | None = None,
    boundary: BoundaryMode = BoundaryMode.MIRROR,
    constants: SsimConstants | None = None,
    downsample: bool = False,
) -> SsimCurve:
    """Record mean SSIM(img, illumination-filtered img) per kernel size.

    ``downsample`` evaluates the curve on a 2x box-decimated image with
    sigma halved per sample; the selection it yields stays within one
    stride of the full-resolution choice.
    """
    d_min, d_max, d_stride = default_sweep_range(img.data.shape)
    k_min, k_max = k_range if k_range is not None else (d_min, d_max)
    if stride is None:
        stride = d_stride if k_range is None else 2
    ks = _validate_sweep(img, k_min, k_max, stride)
    if constants is None:
        constants = SsimConstants.for_levels(img.levels)

    target = img
    if downsample:
        target = img.with_data(_downsample2(img.data))

    values = np.empty(len(ks), dtype=np.float64)
    for idx, k in enumerate(ks):
        sigma = (int(k) - 1) / 4.0
        if downsample:
            sigma = max(sigma / 2.0, 0.5)
        spec = GaussianSpec(sigma=sigma)
        filtered = estimate_illumination(target, spec, boundary)
        values[idx] = ssim(target, filtered, constants)

    integral = np.cumsum(values)
    derivative = np.diff(values) / stride
    return SsimCurve(ks, values, integral, derivative)


def _minmax(a: np.ndarray) -> np.ndarray:
    span = np.ptp(a)
    if span == 0:
        return np.zeros_like(a)
    return (a - a.min()) / span


def objective(curve: SsimCurve, weights: SdifWeights | None = None) -> np.ndarray:
    """J(k): weighted sum of the normalized |integral|, |value|, |derivative|."""
    if weights is None:
        weights = SdifWeights()
    n = len(curve.kernel_sizes)
    # derivative aligned to the left sample; last sample reuses the final step
    d_ext = np.empty(n, dtype=np.float64)
    if n > 1:
        d_ext[:-1] = curve.derivative
        d_ext[-1] = curve.derivative[-1]
    else:
        d_ext[:] = 0.0
    return (
        weights.integral * _minmax(np.abs(curve.integral))
        + weights.value * _minmax(np.abs(curve.ssim))
        + weights.derivative * _minmax(np.abs(d_ext))
    )


def select_cutoff_kernel(
    curve: SsimCurve, weights: SdifWeights | None = None
) -> CutoffSelection:
    """Minimize J over the sweep; ties and degenerate curves go to k_min."""
    if len(curve.kernel_sizes) < 3:
        raise ParamError("cutoff selection needs at least 3 sweep samples")
    j = objective(curve, weights)
    if curve.is_degenerate():
        return CutoffSelection(int(curve.kernel_sizes[0]), j, degenerate=True)
    return CutoffSelection(int(curve.kernel_sizes[int(np.argmin(j))]), j)


def curve_to_csv(curve: SsimCurve, weights: SdifWeights | None = None) -> str:
    """Plot-ready CSV of the sweep: k, ssim, integral, derivative, J."""
    j = objective(curve, weights)
    n = len(curve.kernel_sizes)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "ssim", "integral", "derivative", "J"])
    for i in range(n):
        d = curve.derivative[min(i, n - 2)] if n > 1 else 0.0
        writer.writerow(
            [
                int(curve.kernel_sizes[i]),
                f"{curve.ssim[i]:.9f}",
                f"{curve.integral[i]:.9f}",
                f"{d:.9f}",
                f"{j[i]:.9f}",
            ]
        )
    return buf.getvalue()
