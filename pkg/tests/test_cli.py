import json

import numpy as np
import pytest

from hmhe import ImageBuffer, load_image, save_image
from hmhe.cli import EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, main

from conftest import checkerboard_scene


@pytest.fixture
def scene_file(tmp_path):
    path = tmp_path / "scene.png"
    save_image(checkerboard_scene(n=96), path, 8)
    return path


def _write_noise(path, rng, n=96):
    save_image(ImageBuffer(np.floor(rng.uniform(0, 256, (n, n)))), path, 8)
    return path


class TestEnhance:
    def test_single_image(self, scene_file, tmp_path):
        out = tmp_path / "out"
        rc = main(["enhance", str(scene_file), "--output", str(out), "--kernel", "13"])
        assert rc == EXIT_OK
        assert (out / "scene_hmhe.png").is_file()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "enhance"
        assert manifest["failures"] == []
        assert manifest["config"]["fixed_kernel"] == 13

    def test_emit_intermediates(self, scene_file, tmp_path):
        out = tmp_path / "out"
        rc = main(
            [
                "enhance",
                str(scene_file),
                "--output",
                str(out),
                "--emit-intermediates",
            ]
        )
        assert rc == EXIT_OK
        for suffix in ("_hmhe.png", "_illu.png", "_homo.png", "_sweep.csv"):
            assert (out / f"scene{suffix}").is_file()
        header = (out / "scene_sweep.csv").read_text().splitlines()[0]
        assert header == "k,ssim,integral,derivative,J"

    def test_partial_failure(self, scene_file, tmp_path):
        out = tmp_path / "out"
        rc = main(
            [
                "enhance",
                str(scene_file),
                str(tmp_path / "missing.png"),
                "--output",
                str(out),
                "--kernel",
                "13",
            ]
        )
        assert rc == EXIT_PARTIAL
        assert (out / "scene_hmhe.png").is_file()
        manifest = json.loads((out / "manifest.json").read_text())
        assert len(manifest["failures"]) == 1

    def test_manifest_replay_bit_identical(self, scene_file, tmp_path):
        out1 = tmp_path / "run1"
        assert main(["enhance", str(scene_file), "--output", str(out1), "--seed", "5"]) == EXIT_OK
        out2 = tmp_path / "run2"
        rc = main(
            ["enhance", "--from-manifest", str(out1 / "manifest.json"), "--output", str(out2)]
        )
        assert rc == EXIT_OK
        a = load_image(out1 / "scene_hmhe.png")
        b = load_image(out2 / "scene_hmhe.png")
        assert np.array_equal(a.data, b.data)

    def test_jobs_parallel_matches_serial(self, rng, tmp_path):
        files = [_write_noise(tmp_path / f"n{i}.png", rng, 64) for i in range(3)]
        serial, parallel = tmp_path / "s", tmp_path / "p"
        args = [str(f) for f in files] + ["--kernel", "9"]
        assert main(["enhance", *args, "--output", str(serial)]) == EXIT_OK
        assert main(["enhance", *args, "--output", str(parallel), "--jobs", "3"]) == EXIT_OK
        for f in files:
            a = load_image(serial / f"{f.stem}_hmhe.png")
            b = load_image(parallel / f"{f.stem}_hmhe.png")
            assert np.array_equal(a.data, b.data)

    def test_no_inputs_usage_error(self, tmp_path):
        assert main(["enhance", "--output", str(tmp_path)]) == EXIT_USAGE

    def test_bad_config_usage_error(self, scene_file, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        rc = main(["enhance", str(scene_file), "--config", str(cfg), "--output", str(tmp_path)])
        assert rc == EXIT_USAGE

    def test_no_sweep_requires_kernel(self, scene_file, tmp_path):
        rc = main(["enhance", str(scene_file), "--no-sweep", "--output", str(tmp_path)])
        assert rc == EXIT_USAGE


class TestSweep:
    def test_writes_curve_and_manifest(self, scene_file, tmp_path):
        out = tmp_path / "sweep" / "curve.csv"
        rc = main(
            ["sweep", str(scene_file), "--k-min", "5", "--k-max", "23", "--stride", "2", "--output", str(out)]
        )
        assert rc == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "k,ssim,integral,derivative,J"
        assert len(lines) == 1 + (23 - 5) // 2 + 1
        manifest = json.loads((out.parent / "manifest.json").read_text())
        assert manifest["command"] == "sweep"
        assert manifest["k_cutoff"] % 2 == 1
        assert manifest["degenerate_curve"] is False

    def test_stride_larger_than_range(self, scene_file, tmp_path):
        rc = main(
            ["sweep", str(scene_file), "--k-min", "5", "--k-max", "9", "--stride", "8", "--output", str(tmp_path / "c.csv")]
        )
        assert rc == EXIT_USAGE


class TestCompare:
    def test_methods_report(self, rng, tmp_path):
        img = _write_noise(tmp_path / "noise.png", rng)
        out = tmp_path / "cmp.csv"
        rc = main(
            [
                "compare",
                str(img),
                "--reference",
                str(img),
                "--methods",
                "original",
                "he",
                "clahe",
                "ssr",
                "--output",
                str(out),
            ]
        )
        assert rc == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "image_id,method,IE,SSIM,FSIM,CORR"
        assert len(lines) == 5
        original = lines[1].split(",")
        assert original[1] == "original"
        assert float(original[3]) == pytest.approx(1.0)

    def test_missing_reference(self, rng, tmp_path):
        img = _write_noise(tmp_path / "n.png", rng)
        rc = main(
            ["compare", str(img), "--reference", str(tmp_path / "nope.png"), "--output", str(tmp_path / "c.csv")]
        )
        assert rc == EXIT_USAGE

    def test_external_method(self, rng, tmp_path):
        img = _write_noise(tmp_path / "n.png", rng)
        ext = tmp_path / "ext"
        ext.mkdir()
        _write_noise(ext / "n.png", rng)
        out = tmp_path / "c.csv"
        rc = main(
            ["compare", str(img), "--reference", str(img), "--methods", f"external:{ext}", "--output", str(out)]
        )
        assert rc == EXIT_OK
        assert "external" in out.read_text()

    def test_unknown_method_partial(self, rng, tmp_path):
        img = _write_noise(tmp_path / "n.png", rng)
        rc = main(
            ["compare", str(img), "--reference", str(img), "--methods", "bogus", "--output", str(tmp_path / "c.csv")]
        )
        assert rc == EXIT_PARTIAL


class TestSimulate:
    def test_recipe(self, rng, tmp_path):
        clear = _write_noise(tmp_path / "clear.png", rng)
        recipe = {
            "seed": 3,
            "scenes": [
                {
                    "id": "s1",
                    "clear": str(clear),
                    "fog": {"beta_ext": 1.0, "distance": 1.0, "snake_sigma": 2.0},
                    "illum": {"kind": "planar-gradient", "base": 40.0, "slope": [0.2, 0.1]},
                },
                {
                    "id": "s2",
                    "clear": str(clear),
                    "fog": {"beta_ext": 2.0, "distance": 1.0},
                    "illum": 60.0,
                },
            ],
        }
        recipe_path = tmp_path / "recipe.json"
        recipe_path.write_text(json.dumps(recipe))
        out = tmp_path / "sim"
        rc = main(["simulate", str(recipe_path), "--output", str(out)])
        assert rc == EXIT_OK
        for name in ("s1_clear.png", "s1_foggy.png", "s2_clear.png", "s2_foggy.png"):
            assert (out / name).is_file()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["seed"] == 3

        # rerun reproduces the foggy frames exactly
        out2 = tmp_path / "sim2"
        assert main(["simulate", str(recipe_path), "--output", str(out2)]) == EXIT_OK
        a = load_image(out / "s1_foggy.png")
        b = load_image(out2 / "s1_foggy.png")
        assert np.array_equal(a.data, b.data)

    def test_bad_recipe(self, tmp_path):
        bad = tmp_path / "r.json"
        bad.write_text("nope")
        assert main(["simulate", str(bad), "--output", str(tmp_path)]) == EXIT_USAGE

    def test_missing_clear_partial(self, tmp_path):
        recipe_path = tmp_path / "r.json"
        recipe_path.write_text(json.dumps({"scenes": [{"id": "x", "clear": "/missing.png"}]}))
        assert main(["simulate", str(recipe_path), "--output", str(tmp_path)]) == EXIT_PARTIAL


def test_unknown_subcommand():
    assert main(["frobnicate"]) == EXIT_USAGE
