"""patchpix: texture-aware superpixels from constrained patch matching.

Superpixels are grown by repeatedly matching every pixel's patch within a
spatially constrained window and handing the pixel to the superpixel that
owns the best match; several independently seeded estimates are fused by
majority vote. A pixel-wise SLIC-style baseline, an ASA metric, a composite
texture generator, and label-map I/O round out the toolbox.
"""

from .clustering import (
    ClusterCost,
    DecomposeResult,
    EstimationRun,
    NnscParams,
    RunCounters,
    SlicResult,
    aggregate_label_maps,
    barycenter_weight,
    decompose,
    iteration_eval_bound,
    single_estimate,
    slic_baseline,
)
from .errors import InputError, InvariantError
from .estimators import NnscSuperpixels, SlicSuperpixels, check_image
from .image import (
    LabImage,
    PatchSpec,
    PixelPos,
    gray_to_lab,
    load_raster,
    pad_replicate,
    patch_at,
    patch_distance,
    rgb_to_lab,
    save_raster,
    to_lab_image,
)
from .labelio import (
    boundary_mask,
    boundary_overlay,
    load_ground_truth,
    load_label_map,
    save_ground_truth,
    save_label_map,
)
from .manifest import read_manifest, write_manifest
from .matching import (
    MatchField,
    SearchConfig,
    feasible,
    pm_iteration,
    propagate,
    radius_count,
    random_init,
    random_search,
)
from .metrics import GroundTruth, asa
from .datasets import (
    LAYOUTS,
    TextureSpec,
    default_specs,
    format_texture_spec,
    generate_composite,
    parse_texture_spec,
)
from .rng import XorShift64Star, derive_run_seed, splitmix64
from .state import (
    GridConfig,
    SuperpixelStats,
    enforce_connectivity,
    grid_step,
    init_grid,
    move_pixel,
    recompute_stats,
    update_regularity,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterCost",
    "DecomposeResult",
    "EstimationRun",
    "GridConfig",
    "GroundTruth",
    "InputError",
    "InvariantError",
    "LabImage",
    "LAYOUTS",
    "MatchField",
    "NnscParams",
    "NnscSuperpixels",
    "PatchSpec",
    "PixelPos",
    "RunCounters",
    "SearchConfig",
    "SlicResult",
    "SlicSuperpixels",
    "SuperpixelStats",
    "TextureSpec",
    "XorShift64Star",
    "aggregate_label_maps",
    "asa",
    "barycenter_weight",
    "boundary_mask",
    "boundary_overlay",
    "check_image",
    "decompose",
    "default_specs",
    "derive_run_seed",
    "enforce_connectivity",
    "feasible",
    "format_texture_spec",
    "generate_composite",
    "gray_to_lab",
    "grid_step",
    "init_grid",
    "iteration_eval_bound",
    "load_ground_truth",
    "load_label_map",
    "load_raster",
    "move_pixel",
    "pad_replicate",
    "parse_texture_spec",
    "patch_at",
    "patch_distance",
    "pm_iteration",
    "propagate",
    "radius_count",
    "random_init",
    "random_search",
    "read_manifest",
    "recompute_stats",
    "rgb_to_lab",
    "save_ground_truth",
    "save_label_map",
    "save_raster",
    "single_estimate",
    "slic_baseline",
    "splitmix64",
    "to_lab_image",
    "update_regularity",
    "write_manifest",
]
