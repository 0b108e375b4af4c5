"""Maximum histogram equalization, banding suppression, and the full pipeline.

MHE anchors the CDF mapping at the occupied histogram extremes so the lowest
occupied level maps to 0 and the highest to alpha*(L-1), spending the whole
output range on levels that actually occur. The pipeline splits the image
into an illumination estimate and a homogeneous residual, dithers the
illumination against grayscale banding, and recombines both through their
anchored CDF maps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import Cdf, ImageBuffer, cdf as make_cdf, histogram, quantize_levels
from .errors import DegenerateHistogramError, ParamError
from .filtering import (
    BoundaryMode,
    GaussianSpec,
    estimate_illumination,
    remove_illumination,
)
from .metrics import SsimConstants
from .sdif import SdifWeights, SsimCurve, select_cutoff_kernel, ssim_sweep


def mhe_map(counts: np.ndarray, alpha: float, levels: int) -> np.ndarray:
    """Level map e(i) = (L-1) * alpha * (D(i) - D(i_min)) / (D(i_max) - D(i_min))."""
    if not 0.0 <= alpha <= 1.0:
        raise ParamError(f"alpha must be in [0, 1], got {alpha}")
    d = make_cdf_from_counts(counts)
    lo, hi = d.values[d.i_min], d.values[d.i_max]
    if hi == lo:
        raise DegenerateHistogramError("single occupied level; MHE undefined")
    return (levels - 1) * alpha * (d.values - lo) / (hi - lo)


def make_cdf_from_counts(counts: np.ndarray) -> Cdf:
    from .core import Histogram

    counts = np.asarray(counts, dtype=np.int64)
    return make_cdf(Histogram(counts, int(counts.sum())))


def _quantized_indices(img: ImageBuffer) -> np.ndarray:
    codes = quantize_levels(img.data)
    if codes.min() < 0 or codes.max() > img.levels - 1:
        raise ParamError(
            f"intensities quantize outside [0, {img.levels - 1}]; anchor first"
        )
    return codes.astype(np.int64)


def mhe(img: ImageBuffer, alpha: float = 1.0, levels: int | None = None) -> ImageBuffer:
    """Apply the MHE mapping; output is real-valued, quantized only on save."""
    levels = levels if levels is not None else img.levels
    idx = _quantized_indices(img)
    counts = np.bincount(idx.ravel(), minlength=img.levels)
    emap = mhe_map(counts, alpha, levels)
    return ImageBuffer(emap[idx], levels)


def anchor_quantize(img: ImageBuffer) -> ImageBuffer:
    """Shift by the minimum and requantize the occupied range to [0, L-1].

    Real-valued (possibly negative) buffers become integer level codes; a
    constant buffer becomes all zeros.
    """
    lo = img.data.min()
    span = img.data.max() - lo
    if span == 0:
        return img.with_data(np.zeros_like(img.data))
    scaled = (img.data - lo) * ((img.levels - 1) / span)
    return img.with_data(quantize_levels(scaled))


def gradient_noise_sigma(img: ImageBuffer) -> float:
    """Dither amplitude: max central-difference gradient magnitude / 3."""
    gy, gx = np.gradient(img.data)
    return float(np.hypot(gx, gy).max()) / 3.0


def visual_optimize(filtered: ImageBuffer, seed: int = 0) -> ImageBuffer:
    """Break grayscale banding by adding zero-mean Gaussian noise.

    The noise std is tied to the strongest gradient of the filtered image,
    so a constant image passes through unchanged.
    """
    sigma = gradient_noise_sigma(filtered)
    if sigma == 0.0:
        return filtered
    rng = np.random.default_rng(seed)
    return filtered.with_data(filtered.data + rng.normal(0.0, sigma, filtered.data.shape))


def combine_enhance(
    homo: ImageBuffer,
    illu: ImageBuffer,
    alpha: float,
    levels: int | None = None,
) -> ImageBuffer:
    """Blend the anchored CDF maps of the high- and low-frequency components.

    e = (L-1) * [alpha * T_homo(i_h) + (1-alpha) * T_illu(i_l)] where each T
    is the component's MHE term. A component whose blend weight is zero may
    be degenerate.
    """
    if homo.data.shape != illu.data.shape:
        raise ParamError(f"shape mismatch: {homo.data.shape} vs {illu.data.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise ParamError(f"alpha must be in [0, 1], got {alpha}")
    levels = levels if levels is not None else homo.levels
    out = np.zeros(homo.data.shape, dtype=np.float64)
    for name, comp, weight in (("homo", homo, alpha), ("illu", illu, 1.0 - alpha)):
        if weight == 0.0:
            continue
        idx = _quantized_indices(comp)
        counts = np.bincount(idx.ravel(), minlength=comp.levels)
        try:
            term = mhe_map(counts, 1.0, levels) / (levels - 1)
        except DegenerateHistogramError as exc:
            raise DegenerateHistogramError(f"{name} component: {exc}") from exc
        out += weight * term[idx]
    return ImageBuffer(np.clip((levels - 1) * out, 0, levels - 1), levels)


@dataclass(frozen=True)
class PipelineConfig:
    """All pipeline tunables; JSON-round-trippable, fully defaulted."""

    alpha: float = 0.8
    sdif_weights: SdifWeights = field(default_factory=SdifWeights)
    k_min: int = 5
    k_max: int | None = None  # None: min(M, N) // 4
    stride: int | None = None  # None: at most 48 sweep samples
    fixed_kernel: int | None = None  # bypass the sweep entirely
    downsample_sweep: bool = False
    ssim_constants: SsimConstants | None = None  # None: derived from levels
    boundary: BoundaryMode = BoundaryMode.MIRROR
    noise_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ParamError(f"alpha must be in [0, 1], got {self.alpha}")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "sdif_weights": {
                "integral": self.sdif_weights.integral,
                "value": self.sdif_weights.value,
                "derivative": self.sdif_weights.derivative,
            },
            "k_min": self.k_min,
            "k_max": self.k_max,
            "stride": self.stride,
            "fixed_kernel": self.fixed_kernel,
            "downsample_sweep": self.downsample_sweep,
            "ssim_constants": None
            if self.ssim_constants is None
            else {
                "k1": self.ssim_constants.k1,
                "k2": self.ssim_constants.k2,
                "dynamic_range": self.ssim_constants.dynamic_range,
                "window_size": self.ssim_constants.window_size,
                "window_sigma": self.ssim_constants.window_sigma,
            },
            "boundary": self.boundary.value,
            "noise_seed": self.noise_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        kwargs = {}
        if "alpha" in d:
            kwargs["alpha"] = float(d["alpha"])
        if d.get("sdif_weights") is not None:
            kwargs["sdif_weights"] = SdifWeights(**d["sdif_weights"])
        for key in ("k_min", "k_max", "stride", "fixed_kernel", "noise_seed"):
            if key in d and d[key] is not None:
                kwargs[key] = int(d[key])
        if "downsample_sweep" in d:
            kwargs["downsample_sweep"] = bool(d["downsample_sweep"])
        if d.get("ssim_constants") is not None:
            kwargs["ssim_constants"] = SsimConstants(**d["ssim_constants"])
        if "boundary" in d:
            kwargs["boundary"] = BoundaryMode(d["boundary"])
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        return cls.from_dict(json.loads(text))


@dataclass
class EnhanceResult:
    """Pipeline output with all intermediates."""

    enhanced: ImageBuffer
    illumination: ImageBuffer
    homogeneous: ImageBuffer
    k_cutoff: int
    curve: SsimCurve | None
    noise_sigma: float
    flags: list[str] = field(default_factory=list)


def hmhe_pipeline(img: ImageBuffer, cfg: PipelineConfig | None = None) -> EnhanceResult:
    """SDIF kernel selection, illumination split, dither, and recombination."""
    if cfg is None:
        cfg = PipelineConfig()
    flags: list[str] = []
    levels = img.levels

    curve = None
    if cfg.fixed_kernel is not None:
        k_cutoff = int(cfg.fixed_kernel)
        if k_cutoff < 3 or k_cutoff % 2 == 0:
            raise ParamError(f"fixed kernel must be odd and >= 3, got {k_cutoff}")
    else:
        k_range = None if cfg.k_max is None else (cfg.k_min, cfg.k_max)
        curve = ssim_sweep(
            img,
            k_range=k_range,
            stride=cfg.stride,
            boundary=cfg.boundary,
            constants=cfg.ssim_constants,
            downsample=cfg.downsample_sweep,
        )
        selection = select_cutoff_kernel(curve, cfg.sdif_weights)
        if selection.degenerate:
            # blank or featureless frame: plain MHE, no illumination split
            flags.append("degenerate_sdif_curve")
            zeros = img.with_data(np.zeros_like(img.data))
            enhanced = mhe(img, cfg.alpha, levels)
            return EnhanceResult(
                enhanced=enhanced,
                illumination=zeros,
                homogeneous=img,
                k_cutoff=selection.k_cutoff,
                curve=curve,
                noise_sigma=0.0,
                flags=flags,
            )
        k_cutoff = selection.k_cutoff

    spec = GaussianSpec.from_kernel_size(k_cutoff)
    illumination = estimate_illumination(img, spec, cfg.boundary)
    homogeneous = remove_illumination(img, illumination)

    noise_sigma = gradient_noise_sigma(illumination)
    illu_optimized = visual_optimize(illumination, cfg.noise_seed)

    homo_q = anchor_quantize(homogeneous)
    illu_q = anchor_quantize(illu_optimized)
    enhanced = combine_enhance(homo_q, illu_q, cfg.alpha, levels)

    return EnhanceResult(
        enhanced=enhanced,
        illumination=illumination,
        homogeneous=homogeneous,
        k_cutoff=k_cutoff,
        curve=curve,
        noise_sigma=noise_sigma,
        flags=flags,
    )
