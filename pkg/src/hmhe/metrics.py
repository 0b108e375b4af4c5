"""Image quality assessment: entropy, SSIM, FSIM, correlation, contrast.

SSIM follows the standard Wang et al. form with Gaussian-weighted local
statistics. FSIM aggregates phase-congruency and Scharr-gradient similarity
weighted by the per-pixel maximum phase congruency.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import convolve, convolve1d

from .core import ImageBuffer, histogram
from .errors import (
    ParamError,
    ShapeError,
    UndefinedContrastError,
    UndefinedCorrelationError,
)

_SCHARR_X = np.array([[3, 0, -3], [10, 0, -10], [3, 0, -3]], dtype=np.float64) / 16.0
_SCHARR_Y = _SCHARR_X.T


@dataclass(frozen=True)
class SsimConstants:
    """Regulation constants and window parameters for SSIM."""

    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0
    window_size: int = 11
    window_sigma: float = 1.5

    def __post_init__(self):
        if self.k1 <= 0 or self.k2 <= 0 or self.dynamic_range <= 0:
            raise ParamError("SSIM constants must be positive")
        if self.window_size % 2 == 0 or self.window_size < 3:
            raise ParamError("SSIM window size must be odd and >= 3")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2

    @classmethod
    def for_levels(cls, levels: int) -> "SsimConstants":
        return cls(dynamic_range=float(levels - 1))


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    """1-D Gaussian window, normalized to sum 1."""
    half = size // 2
    t = np.arange(-half, half + 1, dtype=np.float64)
    w = np.exp(-(t**2) / (2.0 * sigma**2))
    return w / w.sum()


def _local_mean(a: np.ndarray, w: np.ndarray, half: int) -> np.ndarray:
    # separable weighted mean, cropped to windows that fit entirely
    tmp = convolve1d(a, w, axis=0, mode="nearest")
    out = convolve1d(tmp, w, axis=1, mode="nearest")
    return out[half:-half, half:-half]


def ssim_map(
    x: ImageBuffer,
    y: ImageBuffer,
    constants: SsimConstants | None = None,
) -> tuple[np.ndarray, float]:
    """Per-window SSIM map over fully-interior windows, plus its mean."""
    if x.data.shape != y.data.shape:
        raise ShapeError(f"shape mismatch: {x.data.shape} vs {y.data.shape}")
    if constants is None:
        if x.levels != y.levels:
            raise ShapeError("dynamic range mismatch; pass explicit constants")
        constants = SsimConstants.for_levels(x.levels)
    size = constants.window_size
    if min(x.data.shape) < size:
        raise ParamError(f"image smaller than the {size}x{size} SSIM window")
    w = gaussian_window(size, constants.window_sigma)
    half = size // 2
    a, b = x.data, y.data
    mu_x = _local_mean(a, w, half)
    mu_y = _local_mean(b, w, half)
    var_x = _local_mean(a * a, w, half) - mu_x**2
    var_y = _local_mean(b * b, w, half) - mu_y**2
    cov = _local_mean(a * b, w, half) - mu_x * mu_y
    c1, c2 = constants.c1, constants.c2
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
    smap = num / den
    return smap, float(smap.mean())


def ssim(x: ImageBuffer, y: ImageBuffer, constants: SsimConstants | None = None) -> float:
    return ssim_map(x, y, constants)[1]


def information_entropy(img: ImageBuffer) -> float:
    """Shannon entropy of the gray-level distribution, in bits."""
    counts = histogram(img).counts
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum())


def phase_congruency(
    img: ImageBuffer,
    nscale: int = 4,
    norient: int = 4,
    min_wavelength: float = 6.0,
    mult: float = 2.0,
    sigma_onf: float = 0.55,
    noise_k: float = 2.0,
    cut_off: float = 0.5,
    gain: float = 10.0,
    epsilon: float = 1e-8,
) -> np.ndarray:
    """Phase congruency map in [0, 1] via a log-Gabor filter bank.

    Noise energy is estimated from the smallest-scale amplitude response,
    which keeps the measure invariant to positive affine intensity maps.
    """
    im = img.data
    rows, cols = im.shape
    spectrum = np.fft.fft2(im)

    u, v = np.meshgrid(np.fft.fftfreq(cols), np.fft.fftfreq(rows))
    radius = np.hypot(u, v)
    radius[0, 0] = 1.0
    theta = np.arctan2(-v, u)
    sin_t, cos_t = np.sin(theta), np.cos(theta)

    # butterworth-style lowpass against the half-sampling discontinuity
    lowpass = 1.0 / (1.0 + (radius / 0.45) ** 30)
    log_gabor = []
    for s in range(nscale):
        f0 = 1.0 / (min_wavelength * mult**s)
        lg = np.exp(-(np.log(radius / f0) ** 2) / (2.0 * math.log(sigma_onf) ** 2))
        lg *= lowpass
        lg[0, 0] = 0.0
        log_gabor.append(lg)

    theta_sigma = math.pi / norient / 1.5
    total_energy = np.zeros((rows, cols))
    total_amplitude = np.zeros((rows, cols))
    for o in range(norient):
        angle = o * math.pi / norient
        ds = sin_t * math.cos(angle) - cos_t * math.sin(angle)
        dc = cos_t * math.cos(angle) + sin_t * math.sin(angle)
        dtheta = np.abs(np.arctan2(ds, dc))
        spread = np.exp(-(dtheta**2) / (2.0 * theta_sigma**2))

        responses = []
        sum_an = np.zeros((rows, cols))
        sum_e = np.zeros((rows, cols))
        sum_o = np.zeros((rows, cols))
        max_an = np.zeros((rows, cols))
        tau = 0.0
        for s in range(nscale):
            eo = np.fft.ifft2(spectrum * log_gabor[s] * spread)
            an = np.abs(eo)
            responses.append(eo)
            sum_an += an
            sum_e += eo.real
            sum_o += eo.imag
            np.maximum(max_an, an, out=max_an)
            if s == 0:
                tau = float(np.median(an)) / math.sqrt(math.log(4.0))

        x_energy = np.hypot(sum_e, sum_o) + epsilon
        mean_e = sum_e / x_energy
        mean_o = sum_o / x_energy
        energy = np.zeros((rows, cols))
        for eo in responses:
            e, od = eo.real, eo.imag
            energy += e * mean_e + od * mean_o - np.abs(e * mean_o - od * mean_e)

        # expected noise energy from the geometric amplitude decay over scales
        total_tau = tau * (1.0 - (1.0 / mult) ** nscale) / (1.0 - 1.0 / mult)
        noise_mean = total_tau * math.sqrt(math.pi / 2.0)
        noise_sigma = total_tau * math.sqrt((4.0 - math.pi) / 2.0)
        energy = np.maximum(energy - (noise_mean + noise_k * noise_sigma), 0.0)

        # down-weight narrow frequency spread
        width = (sum_an / (max_an + epsilon) - 1.0) / (nscale - 1)
        weight = 1.0 / (1.0 + np.exp(gain * (cut_off - width)))

        total_energy += weight * energy
        total_amplitude += sum_an

    return total_energy / (total_amplitude + epsilon)


def _to_common_range(img: ImageBuffer) -> np.ndarray:
    # mixed-depth comparisons happen on a shared [0, 255] scale
    if img.levels == 256:
        return img.data
    return img.data * (255.0 / (img.levels - 1))


def fsim(
    x: ImageBuffer,
    y: ImageBuffer,
    t1: float = 0.85,
    t2: float = 160.0,
) -> float:
    """Feature similarity: phase-congruency-weighted S_PC * S_G aggregation."""
    if x.data.shape != y.data.shape:
        raise ShapeError(f"shape mismatch: {x.data.shape} vs {y.data.shape}")
    a = _to_common_range(x)
    b = _to_common_range(y)
    pc1 = phase_congruency(ImageBuffer(a, 256))
    pc2 = phase_congruency(ImageBuffer(b, 256))
    g1 = np.hypot(
        convolve(a, _SCHARR_X, mode="nearest"), convolve(a, _SCHARR_Y, mode="nearest")
    )
    g2 = np.hypot(
        convolve(b, _SCHARR_X, mode="nearest"), convolve(b, _SCHARR_Y, mode="nearest")
    )
    s_pc = (2.0 * pc1 * pc2 + t1) / (pc1**2 + pc2**2 + t1)
    s_g = (2.0 * g1 * g2 + t2) / (g1**2 + g2**2 + t2)
    pc_m = np.maximum(pc1, pc2)
    denom = pc_m.sum()
    if denom == 0.0:
        # featureless pair (both constant): nothing to distinguish
        return 1.0
    return float((s_pc * s_g * pc_m).sum() / denom)


def correlation(x: ImageBuffer, y: ImageBuffer) -> float:
    """Pearson correlation of the two intensity fields."""
    if x.data.shape != y.data.shape:
        raise ShapeError(f"shape mismatch: {x.data.shape} vs {y.data.shape}")
    a = x.data - x.data.mean()
    b = y.data - y.data.mean()
    denom = math.sqrt(float((a * a).sum()) * float((b * b).sum()))
    if denom == 0.0:
        raise UndefinedCorrelationError("correlation undefined for constant images")
    return float((a * b).sum() / denom)


def contrast(bright: float, dark: float) -> float:
    """Weber-like contrast (bright - dark) / (bright + dark)."""
    if bright + dark == 0:
        raise UndefinedContrastError("contrast undefined when bright + dark = 0")
    if dark < 0 or bright < dark:
        raise ParamError(f"need bright >= dark >= 0, got {bright}, {dark}")
    return (bright - dark) / (bright + dark)


def he_map(counts: np.ndarray, levels: int) -> np.ndarray:
    """HE level map e(i) = (L-1) * D(i)."""
    d = np.cumsum(counts) / counts.sum()
    return (levels - 1) * d


def mapped_contrast(map_values: np.ndarray, i_bright: int, i_dark: int) -> float:
    """Contrast of two levels after an intensity map is applied."""
    return contrast(float(map_values[i_bright]), float(map_values[i_dark]))


@dataclass
class MetricsRow:
    image_id: str
    method: str
    ie: float
    ssim: float
    fsim: float
    corr: float


@dataclass
class MetricsReport:
    """Per-image, per-method IQA rows against a common reference."""

    reference_id: str
    rows: list[MetricsRow] = field(default_factory=list)

    CSV_COLUMNS = ("image_id", "method", "IE", "SSIM", "FSIM", "CORR")

    def add(self, row: MetricsRow) -> None:
        self.rows.append(row)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_COLUMNS)
        for r in self.rows:
            writer.writerow(
                [r.image_id, r.method, f"{r.ie:.5f}", f"{r.ssim:.5f}", f"{r.fsim:.5f}", f"{r.corr:.5f}"]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "reference_id": self.reference_id,
                "rows": [
                    {
                        "image_id": r.image_id,
                        "method": r.method,
                        "IE": r.ie,
                        "SSIM": r.ssim,
                        "FSIM": r.fsim,
                        "CORR": r.corr,
                    }
                    for r in self.rows
                ],
            },
            indent=2,
        )


def score_pair(image_id: str, method: str, candidate: ImageBuffer, reference: ImageBuffer) -> MetricsRow:
    """One report row: IE of the candidate, pair metrics vs the reference."""
    common_c = ImageBuffer(_to_common_range(candidate), 256)
    common_r = ImageBuffer(_to_common_range(reference), 256)
    # IE needs in-range codes; clamp defensively for float-valued candidates
    ie_img = ImageBuffer(np.clip(common_c.data, 0, 255), 256)
    return MetricsRow(
        image_id=image_id,
        method=method,
        ie=information_entropy(ie_img),
        ssim=ssim(common_c, common_r),
        fsim=fsim(common_c, common_r),
        corr=correlation(common_c, common_r),
    )
