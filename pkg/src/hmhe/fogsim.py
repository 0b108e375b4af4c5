"""Forward synthesis of low-visibility images from clear ground truth.

The scattering model attenuates the clear scene by the Lambert-Beer
transmittance, adds a zero-mean Gaussian stand-in for the snake-light
noise, and mixes in the illumination field scaled by one minus the
transmittance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ImageBuffer
from .errors import ParamError, ShapeError


def transmittance(beta: float, distance: float) -> float:
    """T = exp(-beta * distance)."""
    if beta < 0 or distance < 0:
        raise ParamError(f"beta and distance must be nonnegative, got {beta}, {distance}")
    return math.exp(-beta * distance)


@dataclass(frozen=True)
class IllumFieldSpec:
    """Deterministic nonnegative illumination field recipe."""

    kind: str = "flat"  # flat | planar-gradient | gaussian-vignette
    base: float = 0.0
    slope: tuple[float, float] = (0.0, 0.0)  # (per-column, per-row)
    center: tuple[float, float] | None = None  # (x, y); None: image center
    sigma: float = 1.0
    amplitude: float = 0.0

    def __post_init__(self):
        if self.kind not in ("flat", "planar-gradient", "gaussian-vignette"):
            raise ParamError(f"unknown illumination kind: {self.kind!r}")
        if self.sigma <= 0:
            raise ParamError(f"sigma must be positive, got {self.sigma}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "base": self.base,
            "slope": list(self.slope),
            "center": None if self.center is None else list(self.center),
            "sigma": self.sigma,
            "amplitude": self.amplitude,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IllumFieldSpec":
        kwargs = dict(d)
        if "slope" in kwargs:
            kwargs["slope"] = tuple(kwargs["slope"])
        if kwargs.get("center") is not None:
            kwargs["center"] = tuple(kwargs["center"])
        return cls(**kwargs)


def illumination_field(spec: IllumFieldSpec, width: int, height: int, levels: int = 256) -> ImageBuffer:
    """Materialize the field; raises if any value would be negative."""
    x = np.arange(width, dtype=np.float64)[None, :]
    y = np.arange(height, dtype=np.float64)[:, None]
    if spec.kind == "flat":
        data = np.full((height, width), spec.base, dtype=np.float64)
    elif spec.kind == "planar-gradient":
        sx, sy = spec.slope
        data = spec.base + sx * x + sy * y
    else:
        cx, cy = spec.center if spec.center is not None else ((width - 1) / 2.0, (height - 1) / 2.0)
        r2 = (x - cx) ** 2 + (y - cy) ** 2
        data = spec.base + spec.amplitude * np.exp(-r2 / (2.0 * spec.sigma**2))
    if data.min() < 0:
        raise ParamError("illumination field goes negative; adjust base/slope")
    return ImageBuffer(data, levels)


@dataclass(frozen=True)
class FogParams:
    beta_ext: float = 1.0
    distance: float = 1.0
    illum: ImageBuffer | float = 0.0
    snake_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.beta_ext < 0 or self.distance < 0 or self.snake_sigma < 0:
            raise ParamError("beta_ext, distance, snake_sigma must be nonnegative")

    @property
    def transmittance(self) -> float:
        return transmittance(self.beta_ext, self.distance)


def synthesize_fog(clear: ImageBuffer, p: FogParams) -> ImageBuffer:
    """I_view = clear * T + N(0, snake_sigma^2) + illum * (1 - T), clamped."""
    t = p.transmittance
    if isinstance(p.illum, ImageBuffer):
        if p.illum.data.shape != clear.data.shape:
            raise ShapeError(
                f"illumination shape {p.illum.data.shape} != clear {clear.data.shape}"
            )
        illu = p.illum.data
    else:
        illu = float(p.illum)
    out = clear.data * t + illu * (1.0 - t)
    if p.snake_sigma > 0:
        rng = np.random.default_rng(p.seed)
        out = out + rng.normal(0.0, p.snake_sigma, clear.data.shape)
    return clear.with_data(np.clip(out, 0, clear.levels - 1))
