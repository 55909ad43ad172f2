"""Command-line interface.

Subcommands:
  invariant  run the pipeline on RGB(+NIR) image files and export artifacts
  synth      render a synthetic scene from a TOML file, then run the pipeline
  eval       score region pairs on a precomputed invariant image

Every run writes deterministic artifacts; re-running a command on the
same inputs reproduces the same CSV bytes and image pixels. The default
output root can be set with the SHADOWFREE_OUT environment variable.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .entropy import (
    HistogramSpec,
    angular_distance_deg,
    trimmed_histogram,
    write_surface_csv,
    write_surface_heatmap,
)
from .errors import ShadowfreeError
from .evaluate import (
    compare_pipelines,
    format_report_table,
    parse_region_file,
    region_rmse,
    write_report_csv,
)
from .image import (
    CHROMA_EPSILON,
    MultiChannelImage,
    load_pair,
    luminance,
    read_image,
    save_png8,
    save_tiff16,
)
from .pipeline import InvariantOutputs, run_pipeline
from .render import GrayInvariantImage, l1_chromaticity, normalize_display
from .synth import illumination_direction_reduced, save_scene, scene_from_config


def _default_out() -> str:
    return os.environ.get("SHADOWFREE_OUT", ".")


def _parse_norm_pcts(text: str) -> tuple[float, float]:
    try:
        low, high = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected 'low,high' percentiles")
    if not 0.0 <= low < high <= 100.0:
        raise argparse.ArgumentTypeError("need 0 <= low < high <= 100")
    return low, high


def _write_histogram_csv(values: np.ndarray, trim: float, path: str) -> None:
    hist = trimmed_histogram(values, HistogramSpec(trim))
    lines = ["bin_center,count"]
    for center, count in zip(hist.centers, hist.counts):
        lines.append(f"{center:.9g},{int(count)}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _export_outputs(
    outputs: InvariantOutputs,
    image: MultiChannelImage,
    out_dir: str,
    prefix: str,
    trim: float,
    norm_pcts: tuple[float, float],
) -> dict:
    """Write the full artifact set for one pipeline run; returns a manifest."""
    os.makedirs(out_dir, exist_ok=True)
    p = lambda name: os.path.join(out_dir, f"{prefix}_{name}")
    manifest = {}

    gray_disp = outputs.gray.display()
    save_png8(gray_disp, p("invariant_gray.png"))
    save_tiff16(gray_disp, p("invariant_gray.tiff"))
    manifest["invariant_gray"] = [p("invariant_gray.png"), p("invariant_gray.tiff")]

    _write_histogram_csv(outputs.gray.raw, trim, p("invariant_hist.csv"))
    manifest["invariant_hist"] = p("invariant_hist.csv")

    write_surface_csv(outputs.surface, p("entropy_surface.csv"))
    write_surface_heatmap(outputs.surface, p("entropy_surface.png"))
    manifest["entropy_surface"] = [p("entropy_surface.csv"), p("entropy_surface.png")]

    lum = luminance(image)
    save_png8(lum, p("luminance.png"))
    _write_histogram_csv(lum, trim, p("luminance_hist.csv"))
    manifest["luminance"] = [p("luminance.png"), p("luminance_hist.csv")]

    if outputs.chroma.log_values.shape[2] == 3:
        chroma_disp = normalize_display(outputs.chroma.chroma, *norm_pcts)
        save_png8(chroma_disp, p("shadowfree_chroma.png"))
        save_tiff16(chroma_disp, p("shadowfree_chroma.tiff"))
        manifest["shadowfree_chroma"] = [
            p("shadowfree_chroma.png"),
            p("shadowfree_chroma.tiff"),
        ]
    if outputs.reconstructed is not None:
        rec_disp = normalize_display(outputs.reconstructed.values, *norm_pcts)
        save_png8(rec_disp, p("reconstructed.png"))
        save_tiff16(rec_disp, p("reconstructed.tiff"))
        manifest["reconstructed"] = [p("reconstructed.png"), p("reconstructed.tiff")]
    if image.channels == 4:
        l1_disp = normalize_display(l1_chromaticity(image.clamped()), *norm_pcts)
        save_png8(l1_disp, p("l1_chroma.png"))
        manifest["l1_chroma"] = p("l1_chroma.png")

    summary = {
        "angles_deg": list(outputs.direction.angles_deg),
        "direction": [float(x) for x in outputs.direction.vector],
        "min_entropy_bits": outputs.surface.min_entropy_bits,
        "grid_step_deg": outputs.surface.grid_step_deg,
        "channels": image.channels,
    }
    with open(p("summary.json"), "w", encoding="ascii", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    manifest["summary"] = p("summary.json")
    return manifest


def _load_run_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _setting(args, config: dict, name: str, default):
    """CLI flag wins over config file value wins over default."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def cmd_invariant(args) -> int:
    config = _load_run_config(args.config)
    rgb_paths = list(args.rgb or []) or [p["rgb"] for p in config.get("pairs", [])]
    nir_paths = list(args.nir or []) or [p.get("nir") for p in config.get("pairs", [])]
    if not rgb_paths:
        print("error: no input images (use --rgb or a config file)", file=sys.stderr)
        return 2
    if len(nir_paths) < len(rgb_paths):
        nir_paths += [None] * (len(rgb_paths) - len(nir_paths))

    mode = _setting(args, config, "mode", "both")
    grid_step = float(_setting(args, config, "grid_step", 1.0))
    trim = float(_setting(args, config, "trim", 0.05))
    if not 0.0 <= trim <= 0.25:
        print("error: trim fraction must lie in [0, 0.25]", file=sys.stderr)
        return 2
    norm_pcts = _setting(args, config, "norm_pcts", (1.0, 99.0))
    if isinstance(norm_pcts, str):
        norm_pcts = _parse_norm_pcts(norm_pcts)
    norm_pcts = tuple(float(x) for x in norm_pcts)
    linearize = _setting(args, config, "linearize", True)
    max_samples = _setting(args, config, "max_samples", None)
    if max_samples is not None:
        max_samples = int(max_samples)
    out_root = _setting(args, config, "out", _default_out())
    regions_path = _setting(args, config, "regions", None)

    failures = 0
    for rgb_path, nir_path in zip(rgb_paths, nir_paths):
        stem = os.path.splitext(os.path.basename(rgb_path))[0]
        try:
            if mode in ("rgbn", "both") and nir_path is None:
                raise ShadowfreeError(f"NIR required for {mode} mode (input {rgb_path})")
            image = load_pair(rgb_path, nir_path, linearize=linearize)
            runs = []
            if mode in ("rgbn", "both"):
                runs.append(("rgbn", image))
            if mode in ("rgb-baseline", "both"):
                runs.append(("rgb", image.rgb_only() if image.channels == 4 else image))
            for run_mode, img in runs:
                outputs = run_pipeline(
                    img,
                    grid_step_deg=grid_step,
                    trim_fraction=trim,
                    display_percentiles=norm_pcts,
                    max_samples=max_samples,
                )
                _export_outputs(
                    outputs, img, out_root, f"{stem}_{run_mode}", trim, norm_pcts
                )
                angles = ", ".join(f"{a:g}" for a in outputs.direction.angles_deg)
                print(
                    f"{stem} [{run_mode}]: direction ({angles}) deg, "
                    f"entropy {outputs.surface.min_entropy_bits:.4f} bits"
                )
            if regions_path and mode == "both":
                pairs = parse_region_file(regions_path)
                report = compare_pipelines(
                    image,
                    pairs,
                    grid_step_deg=grid_step,
                    trim_fraction=trim,
                    display_percentiles=norm_pcts,
                    max_samples=max_samples,
                )
                write_report_csv(report, os.path.join(out_root, f"{stem}_report.csv"))
                print(format_report_table(report))
        except (ShadowfreeError, OSError, ValueError) as exc:
            failures += 1
            print(f"error: {rgb_path}: {exc}", file=sys.stderr)
            continue
    return 1 if failures else 0


def cmd_synth(args) -> int:
    out_root = args.out or _default_out()
    grid_step = args.grid_step if args.grid_step is not None else 1.0
    trim = args.trim if args.trim is not None else 0.05
    if not 0.0 <= trim <= 0.25:
        print("error: trim fraction must lie in [0, 0.25]", file=sys.stderr)
        return 2
    norm_pcts = args.norm_pcts or (1.0, 99.0)
    try:
        scene = scene_from_config(args.scene)
    except (ShadowfreeError, OSError, KeyError, ValueError) as exc:
        print(f"error: cannot build scene from {args.scene}: {exc}", file=sys.stderr)
        return 1
    stem = os.path.splitext(os.path.basename(args.scene))[0]
    paths = save_scene(scene, out_root, stem)
    print(f"scene written: {paths['rgb']}")

    oracle = {"true_angles_deg": list(scene.true_direction.angles_deg)}
    runs = [("rgbn", scene.image)] if scene.image.channels == 4 else []
    runs.append(("rgb", scene.image.rgb_only() if scene.image.channels == 4 else scene.image))
    for run_mode, img in runs:
        outputs = run_pipeline(
            img,
            grid_step_deg=grid_step,
            trim_fraction=trim,
            display_percentiles=norm_pcts,
            max_samples=args.max_samples,
        )
        _export_outputs(outputs, img, out_root, f"{stem}_{run_mode}", trim, norm_pcts)
        truth = scene.true_direction if img.channels == scene.image.channels else scene.true_direction_rgb
        entry = {
            "found_angles_deg": list(outputs.direction.angles_deg),
            "min_entropy_bits": outputs.surface.min_entropy_bits,
        }
        if truth is not None and truth.dims == outputs.direction.dims:
            entry["angle_to_truth_deg"] = angular_distance_deg(outputs.direction, truth)
        if outputs.direction.dims == 3:
            # In 3 dims every direction orthogonal to the illumination axis
            # is invariant, so the tilt out of that plane is the meaningful
            # error, not the angle to one particular in-plane vector.
            camera = scene.camera if img.channels == 4 else scene.camera.rgb_only()
            axis = illumination_direction_reduced(camera, outputs.basis)
            tilt = 90.0 - math.degrees(
                math.acos(min(1.0, abs(float(outputs.direction.vector @ axis))))
            )
            entry["tilt_from_invariant_plane_deg"] = tilt
        oracle[run_mode] = entry
        if "tilt_from_invariant_plane_deg" in entry:
            angle_msg = f", {entry['tilt_from_invariant_plane_deg']:.3f} deg out of the invariant plane"
        elif "angle_to_truth_deg" in entry:
            angle_msg = f", {entry['angle_to_truth_deg']:.3f} deg from truth"
        else:
            angle_msg = ""
        print(f"{stem} [{run_mode}]: found {entry['found_angles_deg']}{angle_msg}")
    with open(os.path.join(out_root, f"{stem}_oracle.json"), "w", encoding="ascii") as fh:
        json.dump(oracle, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def cmd_eval(args) -> int:
    try:
        values = read_image(args.invariant)
        if values.ndim == 3:
            values = values.mean(axis=2)
        pairs = parse_region_file(args.regions)
        norm_pcts = args.norm_pcts or (1.0, 99.0)
        invariant = GrayInvariantImage(np.maximum(values, 1e-12), *norm_pcts)
        lines = ["label,rmse_pct"]
        for pair in pairs:
            rmse = region_rmse(invariant, pair)
            print(f"{pair.label}: RMSE {rmse:.3f}%")
            lines.append(f"{pair.label},{rmse:.6f}")
    except (ShadowfreeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        stem = os.path.splitext(os.path.basename(args.invariant))[0]
        path = os.path.join(args.out, f"{stem}_eval.csv")
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shadowfree",
        description="Illumination-invariant imaging for RGB and RGB+NIR pairs",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    inv = sub.add_parser("invariant", help="run the pipeline on image files")
    inv.add_argument("--rgb", action="append", help="RGB image path (repeatable)")
    inv.add_argument("--nir", action="append", help="matching NIR image path (repeatable)")
    inv.add_argument("--regions", help="region-pair annotation file")
    inv.add_argument("--mode", choices=["rgbn", "rgb-baseline", "both"], default=None)
    inv.add_argument("--grid-step", dest="grid_step", type=float, default=None,
                     help="search grid step in degrees (default 1)")
    inv.add_argument("--trim", type=float, default=None,
                     help="per-tail trim fraction for entropy (default 0.05)")
    inv.add_argument("--norm-pcts", dest="norm_pcts", type=_parse_norm_pcts, default=None,
                     help="display stretch percentiles, e.g. 1,99")
    linz = inv.add_mutually_exclusive_group()
    linz.add_argument("--linearize", dest="linearize", action="store_true", default=None,
                      help="decode sRGB inputs to linear (default)")
    linz.add_argument("--no-linearize", dest="linearize", action="store_false",
                      help="treat inputs as already linear")
    inv.add_argument("--max-samples", dest="max_samples", type=int, default=None,
                     help="cap pixels per entropy evaluation (deterministic subsample)")
    inv.add_argument("--out", help="output directory (default $SHADOWFREE_OUT or .)")
    inv.add_argument("--config", help="TOML run configuration; flags override it")
    inv.set_defaults(func=cmd_invariant)

    syn = sub.add_parser("synth", help="render a synthetic scene and run the pipeline")
    syn.add_argument("scene", help="scene TOML file")
    syn.add_argument("--grid-step", dest="grid_step", type=float, default=None)
    syn.add_argument("--trim", type=float, default=None)
    syn.add_argument("--norm-pcts", dest="norm_pcts", type=_parse_norm_pcts, default=None)
    syn.add_argument("--max-samples", dest="max_samples", type=int, default=None)
    syn.add_argument("--out", help="output directory (default $SHADOWFREE_OUT or .)")
    syn.set_defaults(func=cmd_synth)

    ev = sub.add_parser("eval", help="score region pairs on a saved invariant image")
    ev.add_argument("--invariant", required=True, help="grayscale invariant image file")
    ev.add_argument("--regions", required=True, help="region-pair annotation file")
    ev.add_argument("--norm-pcts", dest="norm_pcts", type=_parse_norm_pcts, default=None)
    ev.add_argument("--out", help="optional directory for the CSV result")
    ev.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
