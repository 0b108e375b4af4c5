"""Comparison enhancers: global HE, CLAHE, and single-scale retinex.

CLAHE uses per-tile clipped histograms with uniform single-pass excess
redistribution and bilinear interpolation between the four nearest tile
maps. SSR is the log-ratio of the image to its Gaussian surround.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ImageBuffer, normalize, quantize_levels
from .errors import DegenerateHistogramError, ParamError
from .filtering import BoundaryMode, GaussianSpec, convolve_lpf


@dataclass(frozen=True)
class ClaheParams:
    clip_limit: float = 0.02  # normalized: fraction of tile pixel count
    tiles: tuple[int, int] = (8, 8)

    def __post_init__(self):
        if self.clip_limit <= 0:
            raise ParamError(f"clip_limit must be positive, got {self.clip_limit}")
        if min(self.tiles) < 1:
            raise ParamError(f"tile grid must be at least 1x1, got {self.tiles}")


@dataclass(frozen=True)
class SsrParams:
    sigma: float = 50.0
    epsilon: float | None = None  # None: 1 / levels

    def __post_init__(self):
        if self.sigma <= 0:
            raise ParamError(f"sigma must be positive, got {self.sigma}")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ParamError(f"epsilon must be positive, got {self.epsilon}")


def _quantized_indices(img: ImageBuffer) -> np.ndarray:
    codes = quantize_levels(img.data)
    if codes.min() < 0 or codes.max() > img.levels - 1:
        raise ParamError(f"intensities quantize outside [0, {img.levels - 1}]")
    return codes.astype(np.int64)


def he(img: ImageBuffer, levels: int | None = None) -> ImageBuffer:
    """Global histogram equalization: e(i) = (L-1) * D(i)."""
    levels = levels if levels is not None else img.levels
    idx = _quantized_indices(img)
    counts = np.bincount(idx.ravel(), minlength=img.levels)
    if np.count_nonzero(counts) < 2:
        raise DegenerateHistogramError("constant image; HE undefined")
    emap = (levels - 1) * np.cumsum(counts) / counts.sum()
    return ImageBuffer(emap[idx], levels)


def _tile_map(counts: np.ndarray, clip_limit: float, levels: int) -> np.ndarray:
    total = counts.sum()
    occupied = np.count_nonzero(counts)
    if occupied < 2:
        # degenerate tile: identity keeps constant regions constant
        return np.arange(levels, dtype=np.float64)
    clip = clip_limit * total
    clipped = np.minimum(counts, clip)
    excess = total - clipped.sum()
    clipped = clipped + excess / levels
    # cumsum rounding can overshoot the top level by a few ulps
    return np.clip((levels - 1) * np.cumsum(clipped) / total, 0.0, levels - 1)


def clahe(img: ImageBuffer, p: ClaheParams | None = None) -> ImageBuffer:
    """Contrast-limited adaptive HE with bilinear tile-map interpolation."""
    if p is None:
        p = ClaheParams()
    rows, cols = img.data.shape
    ty, tx = p.tiles
    if rows < ty or cols < tx:
        raise ParamError(f"image {img.data.shape} smaller than tile grid {p.tiles}")
    levels = img.levels
    idx = _quantized_indices(img)

    row_edges = np.linspace(0, rows, ty + 1).astype(np.int64)
    col_edges = np.linspace(0, cols, tx + 1).astype(np.int64)
    maps = np.empty((ty, tx, levels), dtype=np.float64)
    for r in range(ty):
        for c in range(tx):
            tile = idx[row_edges[r] : row_edges[r + 1], col_edges[c] : col_edges[c + 1]]
            counts = np.bincount(tile.ravel(), minlength=levels)
            maps[r, c] = _tile_map(counts, p.clip_limit, levels)

    # interpolate between tile centers; replicate outside the center grid
    cy = (row_edges[:-1] + row_edges[1:] - 1) / 2.0
    cx = (col_edges[:-1] + col_edges[1:] - 1) / 2.0
    y = np.arange(rows, dtype=np.float64)
    x = np.arange(cols, dtype=np.float64)

    def _weights(coords, centers):
        i1 = np.searchsorted(centers, coords, side="right")
        i0 = np.clip(i1 - 1, 0, len(centers) - 1)
        i1 = np.clip(i1, 0, len(centers) - 1)
        span = centers[i1] - centers[i0]
        with np.errstate(invalid="ignore", divide="ignore"):
            w = np.where(span > 0, (coords - centers[i0]) / np.where(span > 0, span, 1), 0.0)
        return i0, i1, w

    r0, r1, wy = _weights(y, cy)
    c0, c1, wx = _weights(x, cx)
    r0, r1, wy = r0[:, None], r1[:, None], wy[:, None]
    c0, c1, wx = c0[None, :], c1[None, :], wx[None, :]

    out = (
        (1 - wy) * (1 - wx) * maps[r0, c0, idx]
        + (1 - wy) * wx * maps[r0, c1, idx]
        + wy * (1 - wx) * maps[r1, c0, idx]
        + wy * wx * maps[r1, c1, idx]
    )
    return ImageBuffer(out, levels)


def ssr(
    img: ImageBuffer,
    p: SsrParams | None = None,
    boundary: BoundaryMode = BoundaryMode.MIRROR,
) -> ImageBuffer:
    """Single-scale retinex: log(img + eps) - log(surround + eps), rescaled."""
    if p is None:
        p = SsrParams()
    eps = p.epsilon if p.epsilon is not None else 1.0 / img.levels
    surround = convolve_lpf(img, GaussianSpec(sigma=p.sigma), boundary)
    r = np.log(img.data + eps) - np.log(surround.data + eps)
    rescaled = normalize(img.with_data(r))
    return img.with_data(rescaled.data * (img.levels - 1))
