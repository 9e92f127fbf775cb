"""Command-line interface: decompose, evaluate, generate, bench.

Exit codes: 0 success, 2 usage or input error, 3 internal invariant
violation.
"""

from __future__ import annotations

import functools
import sys
import time

import click
import numpy as np

from .clustering import NnscParams
from .clustering import decompose as nnsc_decompose
from .clustering import slic_baseline
from .datasets import (
    LAYOUTS,
    default_specs,
    format_texture_spec,
    generate_composite,
    parse_texture_spec,
)
from .errors import InputError, InvariantError
from .image import load_raster, save_raster, to_lab_image
from .labelio import (
    boundary_overlay,
    load_ground_truth,
    load_label_map,
    save_ground_truth,
    save_label_map,
)
from .manifest import write_manifest
from .metrics import asa

_NNSC_DEFAULT_ITERS = 8
_SLIC_DEFAULT_ITERS = 10


def _guard(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (InputError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except InvariantError as exc:
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(3)

    return wrapper


@click.group()
def main():
    """Texture-aware superpixel toolbox."""


@main.command(name="decompose")
@click.option("--in", "in_path", required=True, type=click.Path(), help="input image (PNG/PGM/PPM)")
@click.option("--out", "out_path", required=True, type=click.Path(), help="output label map (.png or .csv)")
@click.option("--k", default=200, show_default=True, help="requested superpixel count")
@click.option("--method", type=click.Choice(["nnsc", "slic"]), default="nnsc", show_default=True)
@click.option("--patch-side", default=7, show_default=True)
@click.option("--sigma", default=3, show_default=True, help="match exclusion radius")
@click.option("--iters", default=None, type=int, help="sweeps [default: 8 nnsc, 10 slic]")
@click.option("--m", "estimations", default=4, show_default=True, help="independent estimates to aggregate (nnsc)")
@click.option("--m0", default=10.0, show_default=True, help="regularity weight (nnsc base / slic compactness)")
@click.option("--adaptive-m", is_flag=True, help="scale regularity by superpixel color spread")
@click.option("--seed", default=0, show_default=True)
@click.option("--threads", default=None, type=int, help="worker threads for the estimates [default: auto]")
@click.option("--overlay", "overlay_path", default=None, type=click.Path(), help="write a boundary overlay PNG")
@click.option("--manifest", "manifest_path", default=None, type=click.Path(), help="write a replayable run record")
@_guard
def cmd_decompose(
    in_path,
    out_path,
    k,
    method,
    patch_side,
    sigma,
    iters,
    estimations,
    m0,
    adaptive_m,
    seed,
    threads,
    overlay_path,
    manifest_path,
):
    """Decompose an image into superpixels and save the label map."""
    raster = load_raster(in_path)
    image = to_lab_image(raster)
    start = time.perf_counter()
    if method == "nnsc":
        iterations = iters if iters is not None else _NNSC_DEFAULT_ITERS
        params = NnscParams(
            k=k,
            patch_side=patch_side,
            sigma=sigma,
            iterations=iterations,
            estimations=estimations,
            m0=m0,
            adaptive_m=adaptive_m,
            seed=seed,
        )
        result = nnsc_decompose(image, params, threads=threads)
        init_evals = sum(c.init_evaluations for c in result.counters)
        iter_evals = sum(c.iteration_total for c in result.counters)
    else:
        iterations = iters if iters is not None else _SLIC_DEFAULT_ITERS
        result = slic_baseline(image, k, m=m0, iterations=iterations)
        init_evals = 0
        iter_evals = sum(result.iteration_evaluations)
    elapsed = time.perf_counter() - start
    save_label_map(result.labels, out_path)
    if overlay_path is not None:
        save_raster(overlay_path, boundary_overlay(raster, result.labels))
    click.echo(f"superpixels={result.label_count}")
    click.echo(f"wall_clock_s={elapsed:.3f}")
    click.echo(f"evaluations_iterations={iter_evals}")
    click.echo(f"evaluations_init={init_evals}")
    if manifest_path is not None:
        entries = {
            "command": "decompose",
            "in": in_path,
            "out": out_path,
            "method": method,
            "k": k,
            "patch_side": patch_side,
            "sigma": sigma,
            "iters": iterations,
            "m": estimations,
            "m0": m0,
            "adaptive_m": adaptive_m,
            "seed": seed,
            "threads": "auto" if threads is None else threads,
            "superpixels": result.label_count,
            "grid_step": result.grid_step,
            "wall_clock_s": f"{elapsed:.3f}",
            "evaluations_iterations": iter_evals,
            "evaluations_init": init_evals,
        }
        write_manifest(manifest_path, entries)


@main.command(name="evaluate")
@click.option("--map", "map_path", required=True, type=click.Path(), help="label map (.png or .csv)")
@click.option("--gt", "gt_path", required=True, type=click.Path(), help="ground-truth regions (.png or .csv)")
@click.option("--manifest", "manifest_path", default=None, type=click.Path())
@_guard
def cmd_evaluate(map_path, gt_path, manifest_path):
    """Print the achievable segmentation accuracy of a label map."""
    labels = load_label_map(map_path)
    gt = load_ground_truth(gt_path)
    value = asa(labels, gt)
    click.echo(f"{value:.6f}")
    if manifest_path is not None:
        write_manifest(
            manifest_path,
            {"command": "evaluate", "map": map_path, "gt": gt_path, "asa": f"{value:.6f}"},
        )


@main.command(name="generate")
@click.option("--out", "out_path", required=True, type=click.Path(), help="output composite PNG")
@click.option("--gt", "gt_path", required=True, type=click.Path(), help="output ground truth (.png or .csv)")
@click.option("--manifest", "manifest_path", default=None, type=click.Path())
@click.option("--width", default=256, show_default=True)
@click.option("--height", default=256, show_default=True)
@click.option("--layout", type=click.Choice(sorted(LAYOUTS)), default="vertical", show_default=True)
@click.option(
    "--spec",
    "spec_texts",
    multiple=True,
    help="texture per tile: kind[,frequency[,orientation[,mean[,amplitude[,noise_seed]]]]];"
    " repeat per tile, or omit for a seed-derived family",
)
@click.option("--equal-mean", is_flag=True, help="force identical per-tile mean intensity")
@click.option("--seed", default=0, show_default=True)
@_guard
def cmd_generate(
    out_path, gt_path, manifest_path, width, height, layout, spec_texts, equal_mean, seed
):
    """Generate a composite-texture image with tile ground truth."""
    rows, cols = LAYOUTS[layout]
    if spec_texts:
        specs = [parse_texture_spec(t) for t in spec_texts]
    else:
        specs = default_specs(rows * cols, seed)
    raster, gt = generate_composite(
        width, height, layout, specs, seed=seed, equal_mean=equal_mean
    )
    save_raster(out_path, raster)
    save_ground_truth(gt, gt_path)
    click.echo(f"image={out_path}")
    click.echo(f"gt={gt_path} regions={gt.region_count}")
    if manifest_path is not None:
        entries = {
            "command": "generate",
            "out": out_path,
            "gt": gt_path,
            "width": width,
            "height": height,
            "layout": layout,
            "equal_mean": equal_mean,
            "seed": seed,
        }
        for i, spec in enumerate(specs):
            entries[f"spec{i}"] = format_texture_spec(spec)
        write_manifest(manifest_path, entries)


@main.command(name="bench")
@click.option("--sizes", default="64,96,128,160", show_default=True, help="square image sides")
@click.option("--pixels-per-superpixel", default=256, show_default=True, help="keeps the grid step fixed across sizes")
@click.option("--iters", default=None, type=int, help="sweeps [default: 8 nnsc, 10 slic]")
@click.option("--seed", default=0, show_default=True)
@_guard
def cmd_bench(sizes, pixels_per_superpixel, iters, seed):
    """Tab-separated counter and wall-clock comparison, nnsc vs slic."""
    try:
        side_list = [int(s) for s in sizes.split(",") if s.strip()]
    except ValueError as exc:
        raise InputError(f"bad --sizes {sizes!r}") from exc
    if not side_list or min(side_list) < 32:
        raise InputError("--sizes needs comma-separated integers >= 32")
    if pixels_per_superpixel < 16:
        raise InputError("--pixels-per-superpixel must be >= 16")
    nnsc_iters = iters if iters is not None else _NNSC_DEFAULT_ITERS
    slic_iters = iters if iters is not None else _SLIC_DEFAULT_ITERS
    # warm the compiled kernels so timings measure the algorithm, not the JIT
    warm, _ = generate_composite(48, 48, "2x2", default_specs(4, seed), seed=seed)
    nnsc_decompose(
        to_lab_image(warm), NnscParams(k=9, iterations=2, estimations=1, seed=seed)
    )
    slic_baseline(to_lab_image(warm), 9, iterations=2)
    click.echo("pixels\tmethod\tevaluations\tseconds")
    totals = {"nnsc": 0, "slic": 0}
    for side in side_list:
        raster, _ = generate_composite(
            side, side, "2x2", default_specs(4, seed + side), seed=seed + side
        )
        image = to_lab_image(raster)
        k = max(1, (side * side) // pixels_per_superpixel)
        start = time.perf_counter()
        result = nnsc_decompose(
            image, NnscParams(k=k, iterations=nnsc_iters, seed=seed)
        )
        nnsc_secs = time.perf_counter() - start
        nnsc_evals = sum(c.total for c in result.counters)
        totals["nnsc"] += nnsc_evals
        click.echo(f"{side * side}\tnnsc\t{nnsc_evals}\t{nnsc_secs:.3f}")
        start = time.perf_counter()
        sresult = slic_baseline(image, k, iterations=slic_iters)
        slic_secs = time.perf_counter() - start
        slic_evals = sum(sresult.iteration_evaluations)
        totals["slic"] += slic_evals
        click.echo(f"{side * side}\tslic\t{slic_evals}\t{slic_secs:.3f}")
    if totals["nnsc"] > 0:
        ratio = totals["slic"] / totals["nnsc"]
        click.echo(f"ratio_slic_over_nnsc\t{ratio:.3f}")


if __name__ == "__main__":
    main()
