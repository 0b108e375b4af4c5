"""Image representation, histogram/CDF machinery, and PNG/PGM I/O.

Intensities are carried as float64 throughout the pipeline; quantization to
the L discrete levels happens only when a histogram is built and when an
image is saved.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from .errors import (
    EmptyImageError,
    FormatError,
    ImageIOError,
    RangeError,
)

# ITU-R BT.601 luma weights, R/G/B order
_LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_SUPPORTED_SUFFIXES = {".png", ".pgm"}


@dataclass(frozen=True)
class ImageBuffer:
    """2-D grayscale raster with its source gray-level count.

    ``data`` is float64 row-major (origin top-left, x = column, y = row).
    ``levels`` is the discrete level count of the source sensor (256 or
    65536); intermediate buffers may hold unbounded reals but carry the
    source levels forward.
    """

    data: np.ndarray
    levels: int = 256

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise FormatError(f"expected a 2-D raster, got ndim={arr.ndim}")
        if not np.all(np.isfinite(arr)):
            raise RangeError("image contains NaN or Inf")
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def with_data(self, data: np.ndarray) -> "ImageBuffer":
        """New buffer with the same levels provenance."""
        return ImageBuffer(data, self.levels)


@dataclass(frozen=True)
class Histogram:
    """Per-level pixel counts over i in [0, L-1]."""

    counts: np.ndarray
    total: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        if counts.sum() != self.total:
            raise RangeError("histogram counts do not sum to total")

    @property
    def levels(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class Cdf:
    """Cumulative normalized distribution D(i) with occupied extremes."""

    values: np.ndarray
    i_min: int
    i_max: int


def quantize_levels(data: np.ndarray) -> np.ndarray:
    """Round-half-up quantization to integer levels."""
    return np.floor(np.asarray(data, dtype=np.float64) + 0.5)


def load_image(path) -> ImageBuffer:
    """Load an 8/16-bit PNG or binary PGM as a grayscale ImageBuffer.

    Three-channel inputs are converted to BT.601 luminance. Intensities
    keep their raw integer codes, stored as reals.
    """
    path = Path(path)
    if path.suffix.lower() not in _SUPPORTED_SUFFIXES:
        raise FormatError(f"unsupported format: {path.suffix!r} (need .png or .pgm)")
    if not path.is_file():
        raise ImageIOError(f"cannot read {path}")
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ImageIOError(f"cannot decode {path}")
    if raw.dtype == np.uint8:
        levels = 256
    elif raw.dtype == np.uint16:
        levels = 65536
    else:
        raise FormatError(f"unsupported bit depth: {raw.dtype}")
    if raw.ndim == 2:
        data = raw.astype(np.float64)
    elif raw.ndim == 3 and raw.shape[2] in (3, 4):
        bgr = raw[:, :, :3].astype(np.float64)
        r, g, b = _LUMA_WEIGHTS
        data = r * bgr[:, :, 2] + g * bgr[:, :, 1] + b * bgr[:, :, 0]
    else:
        raise FormatError(f"unsupported channel layout: shape {raw.shape}")
    return ImageBuffer(data, levels)


def save_image(img: ImageBuffer, path, depth: int = 8) -> None:
    """Write the buffer losslessly at the given depth (8 or 16).

    Intensities are clamped to [0, 2^depth - 1] and rounded half-up.
    """
    if depth not in (8, 16):
        raise FormatError(f"unsupported depth: {depth}")
    path = Path(path)
    if path.suffix.lower() not in _SUPPORTED_SUFFIXES:
        raise FormatError(f"unsupported format: {path.suffix!r} (need .png or .pgm)")
    ceiling = 2**depth - 1
    codes = quantize_levels(np.clip(img.data, 0, ceiling))
    out = codes.astype(np.uint8 if depth == 8 else np.uint16)
    parent = path.parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise ImageIOError(f"cannot write {path}")
    if not cv2.imwrite(str(path), out):
        raise ImageIOError(f"cannot write {path}")


def histogram(img: ImageBuffer) -> Histogram:
    """Count pixels per quantized level; caller guarantees range [0, L-1]."""
    levels = quantize_levels(img.data)
    if levels.min() < 0 or levels.max() > img.levels - 1:
        raise RangeError(
            f"intensities quantize outside [0, {img.levels - 1}]: "
            f"[{levels.min()}, {levels.max()}]"
        )
    counts = np.bincount(levels.astype(np.int64).ravel(), minlength=img.levels)
    return Histogram(counts, int(levels.size))


def cdf(h: Histogram) -> Cdf:
    """Cumulative distribution D(i) = sum_{k<=i} counts[k] / total."""
    if h.total == 0:
        raise EmptyImageError("histogram has zero total")
    values = np.cumsum(h.counts) / h.total
    occupied = np.nonzero(h.counts)[0]
    return Cdf(values, int(occupied[0]), int(occupied[-1]))


def normalize(img: ImageBuffer) -> ImageBuffer:
    """Affine map of intensities to [0, 1]; constant images map to zeros."""
    lo = img.data.min()
    hi = img.data.max()
    if hi == lo:
        return img.with_data(np.zeros_like(img.data))
    return img.with_data((img.data - lo) / (hi - lo))
