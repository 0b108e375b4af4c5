"""Batch command-line front end: enhance, sweep, compare, simulate.

Every run writes a manifest next to its outputs recording the command,
resolved config, inputs, outputs, and seed; rerunning from a manifest
reproduces the outputs bit for bit.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import datetime
import json
import sys
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import ClaheParams, SsrParams, clahe, he, ssr
from .core import ImageBuffer, load_image, save_image
from .enhance import PipelineConfig, anchor_quantize, hmhe_pipeline
from .errors import HmheError, ParamError
from .fogsim import FogParams, IllumFieldSpec, illumination_field, synthesize_fog
from .metrics import MetricsReport, score_pair
from .sdif import curve_to_csv, select_cutoff_kernel, ssim_sweep

CSV_SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2


def _depth_for(img: ImageBuffer) -> int:
    return 8 if img.levels == 256 else 16


def _write_manifest(output_dir: Path, payload: dict) -> Path:
    payload = dict(payload)
    payload["version"] = __version__
    payload["csv_schema_version"] = CSV_SCHEMA_VERSION
    payload["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    path = output_dir / "manifest.json"
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def _load_config(args) -> PipelineConfig:
    cfg = PipelineConfig()
    if getattr(args, "from_manifest", None):
        manifest = json.loads(Path(args.from_manifest).read_text())
        cfg = PipelineConfig.from_dict(manifest["config"])
    elif getattr(args, "config", None):
        cfg = PipelineConfig.from_json(Path(args.config).read_text())
    overrides = {}
    if getattr(args, "alpha", None) is not None:
        overrides["alpha"] = args.alpha
    if getattr(args, "seed", None) is not None:
        overrides["noise_seed"] = args.seed
    if getattr(args, "no_sweep", False):
        if getattr(args, "kernel", None) is None:
            raise ParamError("--no-sweep requires --kernel")
        overrides["fixed_kernel"] = args.kernel
    elif getattr(args, "kernel", None) is not None:
        overrides["fixed_kernel"] = args.kernel
    if overrides:
        cfg = PipelineConfig.from_dict({**cfg.to_dict(), **overrides})
    return cfg


def _enhance_one(path: Path, cfg: PipelineConfig, out_dir: Path, emit: bool) -> list[str]:
    img = load_image(path)
    result = hmhe_pipeline(img, cfg)
    depth = _depth_for(img)
    outputs = []
    enhanced_path = out_dir / f"{path.stem}_hmhe.png"
    save_image(result.enhanced, enhanced_path, depth)
    outputs.append(str(enhanced_path))
    if emit:
        illu_path = out_dir / f"{path.stem}_illu.png"
        save_image(anchor_quantize(result.illumination), illu_path, depth)
        outputs.append(str(illu_path))
        homo_path = out_dir / f"{path.stem}_homo.png"
        save_image(anchor_quantize(result.homogeneous), homo_path, depth)
        outputs.append(str(homo_path))
        if result.curve is not None:
            sweep_path = out_dir / f"{path.stem}_sweep.csv"
            sweep_path.write_text(curve_to_csv(result.curve, cfg.sdif_weights))
            outputs.append(str(sweep_path))
    return outputs


def cmd_enhance(args) -> int:
    try:
        cfg = _load_config(args)
    except (HmheError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "from_manifest", None):
        manifest = json.loads(Path(args.from_manifest).read_text())
        inputs = [Path(p) for p in manifest["inputs"]]
    else:
        inputs = [Path(p) for p in args.inputs]
    if not inputs:
        print("error: no inputs", file=sys.stderr)
        return EXIT_USAGE
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)

    outputs: list[str] = []
    failures: list[str] = []

    def work(path: Path):
        return _enhance_one(path, cfg, out_dir, args.emit_intermediates)

    if args.jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(work, p) for p in inputs]
            for path, fut in zip(inputs, futures):
                try:
                    outputs.extend(fut.result())
                except Exception as exc:
                    failures.append(f"{path}: {exc}")
    else:
        for path in inputs:
            try:
                outputs.extend(work(path))
            except Exception as exc:
                failures.append(f"{path}: {exc}")

    _write_manifest(
        out_dir,
        {
            "command": "enhance",
            "config": cfg.to_dict(),
            "inputs": [str(p) for p in inputs],
            "outputs": outputs,
            "failures": failures,
            "seed": cfg.noise_seed,
        },
    )
    for f in failures:
        print(f"failed: {f}", file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_sweep(args) -> int:
    try:
        img = load_image(args.input)
        if args.stride > args.k_max - args.k_min:
            raise ParamError(
                f"stride {args.stride} larger than range [{args.k_min}, {args.k_max}]"
            )
        curve = ssim_sweep(img, (args.k_min, args.k_max), args.stride)
        selection = select_cutoff_kernel(curve)
    except HmheError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_path = Path(args.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(curve_to_csv(curve))
    _write_manifest(
        out_path.parent,
        {
            "command": "sweep",
            "config": {"k_min": args.k_min, "k_max": args.k_max, "stride": args.stride},
            "inputs": [str(args.input)],
            "outputs": [str(out_path)],
            "k_cutoff": selection.k_cutoff,
            "degenerate_curve": selection.degenerate,
            "seed": None,
        },
    )
    print(f"k_cutoff: {selection.k_cutoff}")
    return EXIT_OK


def _run_method(method: str, img: ImageBuffer, cfg: PipelineConfig, input_path: Path) -> ImageBuffer:
    if method == "original":
        return img
    if method == "he":
        return he(img)
    if method == "clahe":
        return clahe(img, ClaheParams())
    if method == "ssr":
        return ssr(img, SsrParams())
    if method == "hmhe":
        return hmhe_pipeline(img, cfg).enhanced
    if method.startswith("external:"):
        ext_dir = Path(method.split(":", 1)[1])
        candidate = ext_dir / input_path.name
        if not candidate.is_file():
            raise ParamError(f"external result missing: {candidate}")
        return load_image(candidate)
    raise ParamError(f"unknown method: {method!r}")


def cmd_compare(args) -> int:
    ref_path = Path(args.reference)
    if not ref_path.exists():
        print(f"error: missing reference: {ref_path}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = _load_config(args)
    except (HmheError, OSError, json.JSONDecodeError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = MetricsReport(reference_id=str(ref_path))
    failures: list[str] = []
    for input_str in args.inputs:
        input_path = Path(input_str)
        ref_file = ref_path / input_path.name if ref_path.is_dir() else ref_path
        try:
            reference = load_image(ref_file)
            img = load_image(input_path)
            for method in args.methods:
                candidate = _run_method(method, img, cfg, input_path)
                report.add(score_pair(input_path.stem, method, candidate, reference))
        except Exception as exc:
            failures.append(f"{input_path}: {exc}")
    out_path = Path(args.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(report.to_csv())
    _write_manifest(
        out_path.parent,
        {
            "command": "compare",
            "config": cfg.to_dict(),
            "inputs": list(args.inputs),
            "outputs": [str(out_path)],
            "reference": str(ref_path),
            "methods": list(args.methods),
            "failures": failures,
            "seed": cfg.noise_seed,
        },
    )
    for f in failures:
        print(f"failed: {f}", file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


def _synthesize_scene(scene: dict, out_dir: Path, default_seed: int) -> list[str]:
    clear = load_image(scene["clear"])
    illum_spec = scene.get("illum")
    if isinstance(illum_spec, dict):
        illum = illumination_field(
            IllumFieldSpec.from_dict(illum_spec), clear.width, clear.height, clear.levels
        )
    else:
        illum = float(illum_spec) if illum_spec is not None else 0.0
    fog = scene.get("fog", {})
    params = FogParams(
        beta_ext=float(fog.get("beta_ext", 1.0)),
        distance=float(fog.get("distance", 1.0)),
        illum=illum,
        snake_sigma=float(fog.get("snake_sigma", 0.0)),
        seed=int(fog.get("seed", default_seed)),
    )
    foggy = synthesize_fog(clear, params)
    depth = _depth_for(clear)
    scene_id = scene.get("id", Path(scene["clear"]).stem)
    clear_path = out_dir / f"{scene_id}_clear.png"
    foggy_path = out_dir / f"{scene_id}_foggy.png"
    save_image(clear, clear_path, depth)
    save_image(foggy, foggy_path, depth)
    return [str(clear_path), str(foggy_path)]


def cmd_simulate(args) -> int:
    try:
        recipe = json.loads(Path(args.recipe).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: bad recipe: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    default_seed = int(recipe.get("seed", args.seed if args.seed is not None else 0))
    outputs: list[str] = []
    failures: list[str] = []
    for scene in recipe.get("scenes", []):
        try:
            outputs.extend(_synthesize_scene(scene, out_dir, default_seed))
        except Exception as exc:
            failures.append(f"{scene.get('id', '?')}: {exc}")
    _write_manifest(
        out_dir,
        {
            "command": "simulate",
            "config": recipe,
            "inputs": [s.get("clear") for s in recipe.get("scenes", [])],
            "outputs": outputs,
            "failures": failures,
            "seed": default_seed,
        },
    )
    for f in failures:
        print(f"failed: {f}", file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmhe",
        description="Low-visibility image enhancement: adaptive illumination "
        "filtering plus maximum histogram equalization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_enh = sub.add_parser("enhance", help="enhance images end to end")
    p_enh.add_argument("inputs", nargs="*", help="input images (PNG/PGM)")
    p_enh.add_argument("--config", help="pipeline config JSON")
    p_enh.add_argument("--from-manifest", help="replay a previous run's manifest")
    p_enh.add_argument("--alpha", type=float, help="high/low frequency blend in [0,1]")
    p_enh.add_argument("--kernel", type=int, help="fixed cutoff kernel size (odd)")
    p_enh.add_argument("--no-sweep", action="store_true", help="skip SDIF; needs --kernel")
    p_enh.add_argument("--emit-intermediates", action="store_true")
    p_enh.add_argument("--jobs", type=int, default=1)
    p_enh.add_argument("--seed", type=int, help="dither noise seed")
    p_enh.add_argument("--output", default=".", help="output directory")
    p_enh.set_defaults(func=cmd_enhance)

    p_swp = sub.add_parser("sweep", help="export the SSIM-vs-kernel curve")
    p_swp.add_argument("input")
    p_swp.add_argument("--k-min", type=int, default=5)
    p_swp.add_argument("--k-max", type=int, default=129)
    p_swp.add_argument("--stride", type=int, default=4)
    p_swp.add_argument("--output", default="sweep.csv", help="output CSV path")
    p_swp.set_defaults(func=cmd_sweep)

    p_cmp = sub.add_parser("compare", help="score methods against a reference")
    p_cmp.add_argument("inputs", nargs="+")
    p_cmp.add_argument("--reference", required=True, help="reference image or directory")
    p_cmp.add_argument(
        "--methods",
        nargs="+",
        default=["hmhe"],
        help="original|he|clahe|ssr|hmhe|external:<dir>",
    )
    p_cmp.add_argument("--config", help="pipeline config JSON")
    p_cmp.add_argument("--alpha", type=float)
    p_cmp.add_argument("--kernel", type=int)
    p_cmp.add_argument("--no-sweep", action="store_true")
    p_cmp.add_argument("--seed", type=int)
    p_cmp.add_argument("--output", default="compare.csv", help="output CSV path")
    p_cmp.set_defaults(func=cmd_compare)

    p_sim = sub.add_parser("simulate", help="materialize clear/foggy pairs from a recipe")
    p_sim.add_argument("recipe", help="scene recipe JSON")
    p_sim.add_argument("--seed", type=int, help="default noise seed")
    p_sim.add_argument("--output", default=".", help="output directory")
    p_sim.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except HmheError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        traceback.print_exc()
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
