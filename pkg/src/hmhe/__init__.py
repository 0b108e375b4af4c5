"""Low-visibility image enhancement with adaptive illumination filtering."""

__version__ = "0.1.0"

from .baselines import ClaheParams, SsrParams, clahe, he, ssr
from .core import Cdf, Histogram, ImageBuffer, cdf, histogram, load_image, normalize, save_image
from .enhance import (
    EnhanceResult,
    PipelineConfig,
    anchor_quantize,
    combine_enhance,
    hmhe_pipeline,
    mhe,
    mhe_map,
    visual_optimize,
)
from .filtering import (
    BoundaryMode,
    GaussianSpec,
    convolve_lpf,
    estimate_illumination,
    gaussian_kernel,
    kernel_size_for_sigma,
    remove_illumination,
)
from .fogsim import (
    FogParams,
    IllumFieldSpec,
    illumination_field,
    synthesize_fog,
    transmittance,
)
from .metrics import (
    MetricsReport,
    MetricsRow,
    SsimConstants,
    contrast,
    correlation,
    fsim,
    gaussian_window,
    information_entropy,
    phase_congruency,
    score_pair,
    ssim,
    ssim_map,
)
from .sdif import (
    SdifWeights,
    SsimCurve,
    curve_to_csv,
    default_sweep_range,
    objective,
    select_cutoff_kernel,
    ssim_sweep,
)

__all__ = [
    "BoundaryMode",
    "Cdf",
    "ClaheParams",
    "EnhanceResult",
    "FogParams",
    "GaussianSpec",
    "Histogram",
    "IllumFieldSpec",
    "ImageBuffer",
    "MetricsReport",
    "MetricsRow",
    "PipelineConfig",
    "SdifWeights",
    "SsimConstants",
    "SsimCurve",
    "SsrParams",
    "anchor_quantize",
    "cdf",
    "clahe",
    "combine_enhance",
    "contrast",
    "convolve_lpf",
    "correlation",
    "curve_to_csv",
    "default_sweep_range",
    "estimate_illumination",
    "fsim",
    "gaussian_kernel",
    "gaussian_window",
    "he",
    "histogram",
    "hmhe_pipeline",
    "illumination_field",
    "information_entropy",
    "kernel_size_for_sigma",
    "load_image",
    "mhe",
    "mhe_map",
    "normalize",
    "objective",
    "phase_congruency",
    "remove_illumination",
    "save_image",
    "score_pair",
    "select_cutoff_kernel",
    "ssim",
    "ssim_map",
    "ssim_sweep",
    "ssr",
    "synthesize_fog",
    "transmittance",
    "visual_optimize",
]
