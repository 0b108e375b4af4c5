import numpy as np
import pytest

from hmhe import ImageBuffer, cdf, histogram, load_image, normalize, save_image
from hmhe.core import Histogram, quantize_levels
from hmhe.errors import (
    EmptyImageError,
    FormatError,
    ImageIOError,
    RangeError,
)

from conftest import random_image


def test_image_buffer_rejects_nan():
    with pytest.raises(RangeError):
        ImageBuffer(np.array([[0.0, np.nan]]))


def test_image_buffer_rejects_1d():
    with pytest.raises(FormatError):
        ImageBuffer(np.zeros(4))


def test_dimensions():
    img = ImageBuffer(np.zeros((3, 5)))
    assert img.height == 3 and img.width == 5


class TestIO:
    def test_zero_pgm_roundtrip(self, tmp_path):
        path = tmp_path / "zero.pgm"
        save_image(ImageBuffer(np.zeros((4, 4))), path, 8)
        back = load_image(path)
        assert back.levels == 256
        assert np.all(back.data == 0.0)

    def test_16bit_png_levels(self, tmp_path):
        path = tmp_path / "deep.png"
        data = np.arange(64 * 64, dtype=float).reshape(64, 64) * 15
        save_image(ImageBuffer(data, 65536), path, 16)
        back = load_image(path)
        assert back.levels == 65536
        assert back.width == back.height == 64
        assert np.array_equal(back.data, data)

    def test_rgb_white_luminance(self, tmp_path):
        import cv2

        path = tmp_path / "white.png"
        cv2.imwrite(str(path), np.full((4, 4, 3), 255, dtype=np.uint8))
        back = load_image(path)
        assert np.allclose(back.data, 255.0)

    def test_rgb_pixel_luminance_weights(self, tmp_path):
        import cv2

        path = tmp_path / "rgb.png"
        bgr = np.zeros((1, 1, 3), dtype=np.uint8)
        bgr[0, 0] = (10, 200, 100)  # B, G, R
        cv2.imwrite(str(path), bgr)
        back = load_image(path)
        assert back.data[0, 0] == pytest.approx(0.299 * 100 + 0.587 * 200 + 0.114 * 10)

    def test_save_clamps(self, tmp_path):
        path = tmp_path / "clamp.png"
        save_image(ImageBuffer(np.array([[255.6, -0.4]])), path, 8)
        back = load_image(path)
        assert back.data[0, 0] == 255.0
        assert back.data[0, 1] == 0.0

    @pytest.mark.parametrize("suffix,depth", [(".png", 8), (".pgm", 8), (".png", 16), (".pgm", 16)])
    def test_integer_roundtrip_lossless(self, rng, tmp_path, suffix, depth):
        levels = 2**depth
        data = np.floor(rng.uniform(0, levels, (16, 16)))
        path = tmp_path / f"rt{suffix}"
        save_image(ImageBuffer(data, levels), path, depth)
        assert np.array_equal(load_image(path).data, data)

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ImageIOError):
            load_image(tmp_path / "missing.png")

    def test_unsupported_format(self, tmp_path):
        bad = tmp_path / "x.jpg"
        bad.write_bytes(b"not an image")
        with pytest.raises(FormatError):
            load_image(bad)

    def test_unwritable_path(self):
        with pytest.raises(ImageIOError):
            save_image(ImageBuffer(np.zeros((2, 2))), "/no/such/dir/out.png", 8)


class TestHistogram:
    def test_direct_count(self):
        img = ImageBuffer(np.array([[0.0, 0.0], [0.0, 255.0]]))
        h = histogram(img)
        assert h.counts[0] == 3 and h.counts[255] == 1
        assert h.total == 4

    def test_constant(self):
        h = histogram(ImageBuffer(np.full((3, 3), 7.0)))
        assert h.counts[7] == 9 and h.counts.sum() == 9

    def test_full_ramp(self):
        img = ImageBuffer(np.arange(256, dtype=float).reshape(16, 16))
        h = histogram(img)
        assert np.all(h.counts == 1)

    def test_out_of_range(self):
        with pytest.raises(RangeError):
            histogram(ImageBuffer(np.array([[0.0, 256.0]])))

    def test_round_half_up(self):
        h = histogram(ImageBuffer(np.array([[0.5, 1.49]])))
        assert h.counts[1] == 2


class TestCdf:
    def test_hand_sum(self):
        counts = np.zeros(256, dtype=np.int64)
        counts[0], counts[255] = 3, 1
        d = cdf(Histogram(counts, 4))
        assert d.values[0] == pytest.approx(0.75)
        assert d.values[255] == pytest.approx(1.0)
        assert d.i_min == 0 and d.i_max == 255

    def test_constant(self):
        d = cdf(histogram(ImageBuffer(np.full((2, 2), 9.0))))
        assert d.i_min == d.i_max == 9
        assert d.values[9] == pytest.approx(1.0)

    def test_two_equal_masses(self):
        img = ImageBuffer(np.array([[10.0, 20.0]]))
        d = cdf(histogram(img))
        assert d.values[10] == pytest.approx(0.5)
        assert d.values[20] == pytest.approx(1.0)

    def test_empty(self):
        with pytest.raises(EmptyImageError):
            cdf(Histogram(np.zeros(256, dtype=np.int64), 0))

    def test_monotone_and_terminal(self, rng):
        for _ in range(20):
            img = random_image(rng, (8, 8))
            d = cdf(histogram(img))
            assert np.all(np.diff(d.values) >= 0)
            assert abs(d.values[-1] - 1.0) < 1e-12
            assert d.values[d.i_max] >= d.values[d.i_min]


class TestNormalize:
    def test_affine_endpoints(self):
        out = normalize(ImageBuffer(np.array([[10.0, 20.0, 30.0]])))
        assert np.allclose(out.data, [[0.0, 0.5, 1.0]])

    def test_constant_to_zeros(self):
        out = normalize(ImageBuffer(np.full((1, 2), 5.0)))
        assert np.all(out.data == 0.0)

    def test_unit_identity(self):
        data = np.array([[0.0, 0.25, 1.0]])
        assert np.allclose(normalize(ImageBuffer(data)).data, data)


def test_quantize_levels_half_up():
    assert np.array_equal(quantize_levels(np.array([0.5, 1.5, -0.4])), [1.0, 2.0, 0.0])
