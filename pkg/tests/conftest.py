import numpy as np
import pytest

from hmhe import ImageBuffer


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_image(rng, shape=(32, 32), levels=256):
    return ImageBuffer(np.floor(rng.uniform(0, levels, shape)), levels)


def checkerboard_scene(n=256, period=4, amplitude=60.0, slope=(0.05, 0.03)):
    """Fine checkerboard over a zero-anchored illumination gradient."""
    y, x = np.mgrid[0:n, 0:n].astype(float)
    illum = slope[0] * x + slope[1] * y
    tgt = amplitude * (((x // period + y // period) % 2))
    return ImageBuffer(np.clip(tgt + illum, 0, 255))


def disk_scene(n=512, radius=40, amplitude=180.0, slope=(0.05, 0.03)):
    """Large round objects over the same illumination gradient."""
    y, x = np.mgrid[0:n, 0:n].astype(float)
    illum = slope[0] * x + slope[1] * y
    tgt = np.zeros((n, n))
    centers = [(120, 120), (380, 300), (200, 400), (400, 120), (256, 256)]
    for cx, cy in centers:
        tgt += amplitude * (np.hypot(x - cx, y - cy) <= radius)
    return ImageBuffer(np.clip(tgt + illum, 0, 255))
